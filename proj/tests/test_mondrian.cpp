#include <cmath>
#include <vector>

#include "doctest.h"
#include "stitforest/errors.hpp"
#include "stitforest/mondrian.hpp"
#include "stitforest/stats.hpp"
#include "stitforest/stit.hpp"

using namespace stitforest;

namespace {

DirectionalDistribution axis_phi(const Vec& w) {
  std::vector<Vec> dirs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Vec e(w.size(), 0.0);
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  return DirectionalDistribution::discrete(std::move(dirs), w);
}

AxisBox unit_box(std::size_t d) { return AxisBox{Vec(d, 0.0), Vec(d, 1.0)}; }

}  // namespace

TEST_CASE("fast path agrees with the general sampler in leaf-count law") {
  struct Config {
    Vec w;
    double lambda;
  };
  const std::vector<Config> configs{
      {Vec{0.5, 0.5}, 2.0}, {Vec{0.3, 0.7}, 3.0}, {Vec{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.5}};
  Rng rng(31);
  const std::size_t reps = 5000;
  for (const auto& cfg : configs) {
    const std::size_t d = cfg.w.size();
    AxisBox box = unit_box(d);
    HPolytope window = box.as_polytope();
    auto phi = axis_phi(cfg.w);
    WeightedMondrianSpec spec{cfg.w, cfg.lambda};
    std::vector<double> fast(reps), general(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      fast[r] = mondrian_sample(box, spec, rng).leaf_count();
      general[r] = stit_sample(window, phi, cfg.lambda, rng).leaf_count();
    }
    const double ks = ks_two_sample(fast, general);
    CHECK(ks < ks_two_sample_critical(0.01, reps, reps));
  }
}

TEST_CASE("unnormalized weights equal a rescaled lifetime") {
  // mondrian(w, lambda) has the law of mondrian(w / W, lambda * W).
  Rng rng(32);
  AxisBox box = unit_box(2);
  WeightedMondrianSpec raw{Vec{1.0, 3.0}, 1.2};
  WeightedMondrianSpec scaled{Vec{0.25, 0.75}, 4.8};
  const std::size_t reps = 4000;
  std::vector<double> a(reps), b(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    a[r] = mondrian_sample(box, raw, rng).leaf_count();
    b[r] = mondrian_sample(box, scaled, rng).leaf_count();
  }
  CHECK(ks_two_sample(a, b) < ks_two_sample_critical(0.01, reps, reps));
}

TEST_CASE("expected leaf count formula") {
  WeightedMondrianSpec spec{Vec{0.5, 0.5}, 3.0};
  auto pred = expected_leaf_count(unit_box(2), spec);
  CHECK(pred.value == doctest::Approx(6.25));
  CHECK(pred.exact);

  // General box: flagged as derived and gated by Monte Carlo.
  AxisBox box{Vec{0.0, 0.0}, Vec{2.0, 0.5}};
  WeightedMondrianSpec spec2{Vec{0.6, 0.4}, 2.0};
  auto pred2 = expected_leaf_count(box, spec2);
  CHECK(pred2.value == doctest::Approx((1.0 + 2.0 * 0.6 * 2.0) * (1.0 + 2.0 * 0.4 * 0.5)));
  CHECK_FALSE(pred2.exact);
  Rng rng(33);
  const std::size_t reps = 5000;
  std::vector<double> counts(reps);
  for (auto& c : counts) c = mondrian_sample(box, spec2, rng).leaf_count();
  CHECK(std::abs(mean(counts) - pred2.value) < 4.0 * stderr_of_mean(counts));
}

TEST_CASE("zero cell sampler: sides are Gamma(2, lambda w_i) and E[vol] = 4") {
  Rng rng(34);
  WeightedMondrianSpec spec{Vec{0.5, 0.5}, 2.0};  // side rates lambda w = 1
  const std::size_t reps = 4000;
  std::vector<double> s0(reps), s1(reps), vol(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    AxisBox cell = zero_cell_sample(spec, rng);
    CHECK(cell.lo[0] < 0.0);
    CHECK(cell.hi[0] > 0.0);
    s0[r] = cell.side(0);
    s1[r] = cell.side(1);
    vol[r] = cell.volume();
  }
  CHECK(ks_one_sample(s0, [](double x) { return gamma2_cdf(x, 1.0); }) <
        ks_one_sample_critical(0.01, reps));
  CHECK(ks_one_sample(s1, [](double x) { return gamma2_cdf(x, 1.0); }) <
        ks_one_sample_critical(0.01, reps));
  CHECK(std::abs(mean(vol) - 4.0) < 3.0 * stderr_of_mean(vol));
}

TEST_CASE("windowed zero cell matches the direct sampler in law") {
  Rng rng(35);
  const double lambda = 2.0;
  WeightedMondrianSpec spec{Vec{0.5, 0.5}, lambda};
  AxisBox window{Vec{-12.0, -12.0}, Vec{12.0, 12.0}};
  const std::size_t reps = 2000;
  std::vector<double> windowed(reps), direct(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    auto tree = mondrian_sample(window, spec, rng);
    auto cell = tree.zero_cell().as_axis_box();
    REQUIRE(cell.has_value());
    windowed[r] = cell->second[0] - cell->first[0];
    direct[r] = zero_cell_sample(spec, rng).side(0);
  }
  CHECK(ks_two_sample(windowed, direct) < ks_two_sample_critical(0.01, reps, reps));
}

TEST_CASE("leaf boxes tile the window") {
  Rng rng(36);
  AxisBox box{Vec{-1.0, 0.0, 2.0}, Vec{1.5, 2.0, 5.0}};
  WeightedMondrianSpec spec{Vec{0.4, 0.3, 0.3}, 2.5};
  auto tree = mondrian_sample(box, spec, rng);
  auto leaves = leaf_boxes(tree);
  CHECK(leaves.size() == static_cast<std::size_t>(tree.leaf_count()));
  double total = 0.0;
  for (const auto& leaf : leaves) total += leaf.volume();
  CHECK(total == doctest::Approx(box.volume()).epsilon(1e-9));
  // routing agreement: each sampled point lies in the leaf box locate() picks
  for (int i = 0; i < 500; ++i) {
    Vec x{rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1]),
          rng.uniform(box.lo[2], box.hi[2])};
    const int leaf = tree.locate(x);
    CHECK(leaves[static_cast<std::size_t>(leaf)].contains(x, 1e-9));
  }
}

TEST_CASE("projected diameter tail bound is tight for a single unit-weight axis") {
  Rng rng(37);
  // s=1, w=1, r=0: bound = Gamma(2+k)/Gamma(2), exactly the Erlang(2,1) moment
  auto check1 = projected_zero_cell_diameter_stats(Vec{1.0}, {0}, 1, 0.0, 20000, rng);
  CHECK(check1.bound == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(check1.estimate - 2.0) < 3.0 * check1.stderr_);
  CHECK(check1.pass);

  auto check2 = projected_zero_cell_diameter_stats(Vec{1.0}, {0}, 2, 0.0, 20000, rng);
  CHECK(check2.bound == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(check2.estimate - 6.0) < 3.0 * check2.stderr_);
  CHECK(check2.pass);
}

TEST_CASE("tail bound with a positive threshold stays tight in one dimension") {
  // E[T 1{T >= 3}] for T ~ Gamma(2,1): integrate t^2 e^-t from 3 = 17 e^-3.
  const double exact = 17.0 * std::exp(-3.0);
  CHECK(projected_diameter_tail_bound(Vec{1.0}, {0}, 1, 3.0) ==
        doctest::Approx(exact).epsilon(1e-12));
  Rng rng(38);
  auto check = projected_zero_cell_diameter_stats(Vec{1.0}, {0}, 1, 3.0, 60000, rng);
  CHECK(std::abs(check.estimate - exact) < 3.0 * check.stderr_);
  CHECK(check.pass);
}

TEST_CASE("tail bound dominates the two-axis diameter moment") {
  Rng rng(39);
  // spec arithmetic: s=2, k=1, w=(0.3,0.7): Gamma(5)/(0.3 Gamma(4)) = 13.33...
  auto check = projected_zero_cell_diameter_stats(Vec{0.3, 0.7}, {0, 1}, 1, 0.0, 20000, rng);
  CHECK(check.bound == doctest::Approx(24.0 / (0.3 * 6.0)).epsilon(1e-12));
  CHECK(check.estimate < check.bound);
  CHECK(check.pass);

  auto check_k2 = projected_zero_cell_diameter_stats(Vec{0.3, 0.7}, {0, 1}, 2, 1.0, 20000, rng);
  CHECK(check_k2.pass);
  CHECK_THROWS_AS(projected_zero_cell_diameter_stats(Vec{0.5, 0.5}, {2}, 1, 0.0, 100, rng),
                  IndexOutOfRange);
}
