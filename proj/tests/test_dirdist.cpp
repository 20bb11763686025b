#include <cmath>

#include "doctest.h"
#include "stitforest/dirdist.hpp"
#include "stitforest/errors.hpp"
#include "stitforest/rng.hpp"
#include "stitforest/stit.hpp"

using namespace stitforest;

TEST_CASE("validation and exact renormalization") {
  auto phi = DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{0.5, 0.5});
  CHECK(phi.dim() == 2);
  double total = 0.0;
  for (double w : phi.weights()) total += w;
  CHECK(total == 1.0);  // exact after renormalization

  // unnormalized inputs are normalized silently only within 1e-12
  CHECK_THROWS_AS(
      DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{0.6, 0.5}),
      DimensionMismatch);
  CHECK_THROWS_AS(
      DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{1.5, -0.5}),
      DimensionMismatch);
  // antipodal representatives collide
  CHECK_THROWS_AS(
      DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{-1.0, 0.0}}, Vec{0.5, 0.5}),
      DimensionMismatch);
  // spanning failure
  CHECK_THROWS_AS(DirectionalDistribution::discrete({Vec{1.0, 0.0}}, Vec{1.0}), RankDeficient);
}

TEST_CASE("directions are stored unit") {
  auto phi = DirectionalDistribution::discrete({Vec{2.0, 0.0}, Vec{0.0, 3.0}}, Vec{0.25, 0.75});
  CHECK(norm2(phi.directions()[0]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm2(phi.directions()[1]) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("isotropic placeholder is rejected by the sampler") {
  auto iso = DirectionalDistribution::isotropic(2);
  HPolytope cube = HPolytope::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  Rng rng(5);
  CHECK_THROWS_AS(stit_sample(cube, iso, 1.0, rng), UnsupportedDistribution);
  CHECK_THROWS_AS(iso.zonoid(), UnsupportedDistribution);
}

TEST_CASE("associated zonoid of axis weights has volume prod(w)") {
  auto phi = DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{0.3, 0.7});
  CHECK(zonotope_volume(phi.zonoid()) == doctest::Approx(0.21).epsilon(1e-12));
  // support of the zonoid: h(u) = 0.5 sum w |<u, v>|
  CHECK(zonotope_support(phi.zonoid(), Vec{0.0, 1.0}) == doctest::Approx(0.35));
}
