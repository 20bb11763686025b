#include <cmath>

#include "doctest.h"
#include "stitforest/errors.hpp"
#include "stitforest/geometry.hpp"
#include "stitforest/rng.hpp"

using namespace stitforest;

namespace {

HPolytope random_box(Rng& rng, std::size_t d, Vec& lo, Vec& hi) {
  lo.assign(d, 0.0);
  hi.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = rng.uniform(-4.0, 4.0);
    hi[i] = lo[i] + rng.uniform(0.2, 5.0);
  }
  return HPolytope::box(lo, hi);
}

// Triangle as halfspaces from its vertex list.
HPolytope triangle(const Vec& a, const Vec& b, const Vec& c) {
  auto edge = [](const Vec& p, const Vec& q, const Vec& other) {
    Vec n{q[1] - p[1], -(q[0] - p[0])};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1]);
    n[0] /= len;
    n[1] /= len;
    double off = n[0] * p[0] + n[1] * p[1];
    if (n[0] * other[0] + n[1] * other[1] > off) {
      n[0] = -n[0];
      n[1] = -n[1];
      off = -off;
    }
    return Halfspace{n, off};
  };
  return HPolytope::build(2, {edge(a, b, c), edge(b, c, a), edge(c, a, b)});
}

}  // namespace

TEST_CASE("support and width match box closed forms on random pairs") {
  Rng rng(1001);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
    Vec lo, hi;
    HPolytope p = random_box(rng, d, lo, hi);
    Vec u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = rng.normal();
    double expect_support = 0.0, expect_width = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      expect_support += std::max(u[i] * lo[i], u[i] * hi[i]);
      expect_width += std::abs(u[i]) * (hi[i] - lo[i]);
    }
    CHECK(p.support(u) == doctest::Approx(expect_support).epsilon(1e-8));
    CHECK(p.width(u) == doctest::Approx(expect_width).epsilon(1e-8));
  }
}

TEST_CASE("interior point and containment") {
  Rng rng(1002);
  Vec lo, hi;
  HPolytope p = random_box(rng, 3, lo, hi);
  CHECK(p.contains(p.interior_point()));
  Vec outside = hi;
  outside[0] += 1.0;
  CHECK_FALSE(p.contains(outside));
  CHECK(p.inradius() > 0.0);

  // Chebyshev center of a box: inradius is half the smallest side.
  double min_side = 1e30;
  for (std::size_t i = 0; i < 3; ++i) min_side = std::min(min_side, hi[i] - lo[i]);
  HPolytope rebuilt = HPolytope::build(3, p.faces());
  CHECK(rebuilt.inradius() == doctest::Approx(0.5 * min_side).epsilon(1e-7));
}

TEST_CASE("empty and unbounded construction fail loudly") {
  // x <= 0 and x >= 1 in 1D
  CHECK_THROWS_AS(HPolytope::build(1, {{Vec{1.0}, 0.0}, {Vec{-1.0}, -1.0}}), InfeasiblePolytope);
  // Single halfspace is unbounded.
  CHECK_THROWS_AS(HPolytope::build(2, {{Vec{1.0, 0.0}, 1.0}}), UnboundedObjective);
  // Recession direction in support.
  Vec lo{0.0, 0.0}, hi{1.0, 1.0};
  HPolytope p = HPolytope::box(lo, hi);
  CHECK_NOTHROW(p.support(Vec{1.0, 1.0}));
}

TEST_CASE("split: containment partition on random interior points") {
  Rng rng(1003);
  Vec lo, hi;
  HPolytope p = random_box(rng, 2, lo, hi);
  Vec n{rng.normal(), rng.normal()};
  const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1]);
  n[0] /= nn;
  n[1] /= nn;
  const Vec& c = p.interior_point();
  Hyperplane plane{n, n[0] * c[0] + n[1] * c[1]};  // passes through the center
  auto [lower, upper] = split(p, plane);
  REQUIRE(lower.has_value());
  REQUIRE(upper.has_value());
  for (int i = 0; i < 1000; ++i) {
    Vec x{rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])};
    const double side = n[0] * x[0] + n[1] * x[1] - plane.offset;
    if (std::abs(side) < 1e-7) continue;
    CHECK(lower->contains(x) == (side < 0));
    CHECK(upper->contains(x) == (side > 0));
  }
}

TEST_CASE("split of the unit square along a diagonal: MC volumes are half/half") {
  HPolytope square = HPolytope::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  //0.5*(x + y) = 0.5   =>  the main diagonal through (1,0), (0,1)
  Hyperplane diag{Vec{inv_sqrt2, inv_sqrt2}, inv_sqrt2};
  auto [lower, upper] = split(square, diag);
  REQUIRE(lower.has_value());
  REQUIRE(upper.has_value());
  Rng rng(1004);
  const int n = 200000;
  int in_lower = 0, in_upper = 0;
  for (int i = 0; i < n; ++i) {
    Vec x{rng.uniform(), rng.uniform()};
    if (lower->contains(x, 0.0)) ++in_lower;
    if (upper->contains(x, 0.0)) ++in_upper;
  }
  // MC volume of each triangle: 0.5 within ~4 sigma (sigma ~ 0.0011)
  CHECK(std::abs(in_lower / double(n) - 0.5) < 0.005);
  CHECK(std::abs(in_upper / double(n) - 0.5) < 0.005);
}

TEST_CASE("sliver sides are rejected") {
  HPolytope square = HPolytope::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  Hyperplane grazing{Vec{1.0, 0.0}, 1e-10};
  auto [lower, upper] = split(square, grazing);
  CHECK_FALSE(lower.has_value());
  REQUIRE(upper.has_value());
  CHECK(upper->contains(Vec{0.5, 0.5}));
}

TEST_CASE("projected width and box diameter closed forms") {
  HPolytope box = HPolytope::box(Vec{0.0, 0.0, 0.0}, Vec{2.0, 1.0, 4.0});
  Mat basis(2, 3);
  basis.at(0, 0) = 1.0;
  basis.at(1, 2) = 1.0;  // span{e1, e3}
  CHECK(projected_width(box, basis, Vec{1.0, 0.0}) == doctest::Approx(2.0));
  CHECK(projected_width(box, basis, Vec{0.0, 1.0}) == doctest::Approx(4.0));

  Rng rng(1005);
  // coordinate-subspace projection of a box: exact sqrt(4 + 16)
  CHECK(diameter_estimate(box, basis, 8, rng) == doctest::Approx(std::sqrt(20.0)));
  // full-space diameter of the box
  Mat full(3, 3);
  for (int i = 0; i < 3; ++i) full.at(i, i) = 1.0;
  CHECK(diameter_estimate(box, full, 8, rng) == doctest::Approx(std::sqrt(4.0 + 1.0 + 16.0)));
}

TEST_CASE("diameter of an equilateral triangle is its side length") {
  const double h = std::sqrt(3.0) / 2.0;
  HPolytope tri = triangle(Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.5, h});
  Mat full(2, 2);
  full.at(0, 0) = 1.0;
  full.at(1, 1) = 1.0;
  Rng rng(1006);
  const double est = diameter_estimate(tri, full, 4096, rng);
  CHECK(est == doctest::Approx(1.0).epsilon(0.01));
  CHECK(est <= 1.0 + 1e-9);  // sampling never overshoots the true diameter
}

TEST_CASE("axis box detection") {
  HPolytope box = HPolytope::box(Vec{-1.0, 2.0}, Vec{3.0, 5.0});
  auto bounds = box.as_axis_box();
  REQUIRE(bounds.has_value());
  CHECK(bounds->first[0] == doctest::Approx(-1.0));
  CHECK(bounds->second[1] == doctest::Approx(5.0));

  // x + y = 4 passes through the interior of [-1,3] x [2,5]
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto [lower, upper] = split(box, Hyperplane{Vec{inv_sqrt2, inv_sqrt2}, 4.0 * inv_sqrt2});
  REQUIRE(lower.has_value());
  CHECK_FALSE(lower->as_axis_box().has_value());
}
