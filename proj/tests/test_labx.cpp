#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "stitforest/csvio.hpp"
#include "stitforest/errors.hpp"
#include "stitforest/experiments.hpp"
#include "stitforest/stats.hpp"
#include "stitforest/targets.hpp"

using namespace stitforest;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Mat row_matrix(const Vec& row) {
  Mat a(1, row.size());
  for (std::size_t i = 0; i < row.size(); ++i) a.at(0, i) = row[i];
  return a;
}

}  // namespace

TEST_CASE("ridge target links and Lipschitz constants") {
  const Vec x{0.3, 0.9};

  const RidgeTarget lin(row_matrix({1.0, 0.0}), "linear", 0.0);
  CHECK(lin.dim() == 2);
  CHECK(lin.ridge_dim() == 1);
  CHECK(lin.value(x) == 0.3);
  CHECK(lin.lipschitz() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin.beta() == 1.0);

  const RidgeTarget sine(row_matrix({1.0, 0.0}), "sine", 0.0);
  CHECK(sine.value(x) == doctest::Approx(std::sin(0.3)).epsilon(1e-15));

  const RidgeTarget abss(row_matrix({-1.0, 0.0}), "abs-sum", 0.0);
  CHECK(abss.value(x) == doctest::Approx(0.3).epsilon(1e-15));

  Mat a2(2, 2);
  a2.at(0, 0) = 1.0;
  a2.at(1, 1) = 2.0;
  const RidgeTarget quad(a2, "quadratic", 0.0);
  CHECK(quad.value(x) == doctest::Approx(0.09 + 4.0 * 0.81).epsilon(1e-14));
  // 2 sqrt(d) sigma1^2 with sigma1 = 2
  CHECK(quad.lipschitz() == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-12));

  Mat a23(2, 3);
  a23.at(0, 0) = 1.0;
  a23.at(1, 1) = 1.0;
  const RidgeTarget two(a23, "linear", 0.0);
  CHECK(two.ridge_dim() == 2);
  CHECK(two.value(Vec{0.25, 0.5, 0.9}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("ridge target rejects degenerate configurations") {
  CHECK_THROWS_AS(RidgeTarget(Mat(), "linear", 0.0), InvalidTarget);
  CHECK_THROWS_AS(RidgeTarget(Mat(3, 2, 1.0), "linear", 0.0), InvalidTarget);
  CHECK_THROWS_AS(RidgeTarget(row_matrix({1.0, 0.0}), "linear", -0.1), InvalidTarget);
  CHECK_THROWS_AS(RidgeTarget(row_matrix({1.0, 0.0}), "cubic", 0.0), InvalidTarget);
  Mat dep(2, 2);
  dep.at(0, 0) = 1.0;
  dep.at(0, 1) = 1.0;
  dep.at(1, 0) = 2.0;
  dep.at(1, 1) = 2.0;
  CHECK_THROWS_AS(RidgeTarget(dep, "linear", 0.0), InvalidTarget);
}

TEST_CASE("ridge target subspace spans the rows") {
  const RidgeTarget lin(row_matrix({0.0, 3.0}), "linear", 0.0);
  const SubspaceSpec sub = lin.subspace();
  CHECK(sub.dim() == 1);
  CHECK(sub.ambient_dim() == 2);
  CHECK(std::abs(sub.basis.at(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sub.basis.at(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("covariate laws: support, moments, errors") {
  Rng rng(2026);
  const AxisBox cube = mu_window("uniform-cube", 2);
  CHECK(cube.lo == Vec{0.0, 0.0});
  CHECK(cube.hi == Vec{1.0, 1.0});
  const AxisBox ball = mu_window("uniform-ball", 3);
  CHECK(ball.lo == Vec{-1.0, -1.0, -1.0});

  for (int i = 0; i < 200; ++i) {
    const Vec x = sample_mu_point("uniform-cube", 2, rng);
    REQUIRE(x.size() == 2);
    CHECK(x[0] >= 0.0);
    CHECK(x[1] <= 1.0);
  }

  // E|X|^2 = d/(d+2) on the unit ball
  const std::size_t n = 4000;
  std::vector<double> sq(n, 0.0);
  for (auto& v : sq) {
    const Vec x = sample_mu_point("uniform-ball", 3, rng);
    double s = 0.0;
    for (double c : x) s += c * c;
    REQUIRE(s <= 1.0 + 1e-12);
    v = s;
  }
  CHECK(std::abs(mean(sq) - 0.6) <= 3.0 * stderr_of_mean(sq));

  CHECK_THROWS_AS(sample_mu_point("gaussian", 2, rng), ConfigError);
  CHECK_THROWS_AS(mu_window("gaussian", 2), ConfigError);
}

TEST_CASE("sample_dataset: noiseless labels match f, noise is centered") {
  const RidgeTarget lin(row_matrix({1.0, 0.0}), "linear", 0.0);
  Rng rng(7);
  const Dataset data = sample_dataset(lin, "uniform-cube", 500, rng);
  REQUIRE(data.size() == 500);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(data.y[i] == data.x.at(i, 0));

  const RidgeTarget noisy(row_matrix({1.0, 0.0}), "linear", 0.5);
  Rng rng2(8);
  const Dataset nd = sample_dataset(noisy, "uniform-cube", 4000, rng2);
  std::vector<double> resid(nd.size(), 0.0);
  for (std::size_t i = 0; i < nd.size(); ++i) resid[i] = nd.y[i] - nd.x.at(i, 0);
  CHECK(std::abs(mean(resid)) <= 3.0 * 0.5 / std::sqrt(4000.0));
  CHECK(std::abs(sample_variance(resid) - 0.25) <= 0.03);

  Rng rng3(7);
  const Dataset again = sample_dataset(lin, "uniform-cube", 500, rng3);
  CHECK(again.y == data.y);
  CHECK(again.x.data == data.x.data);
}

TEST_CASE("estimate_risk: single-leaf tree recovers Var(f(X))") {
  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.0);
  EstimatorSpec est;
  est.sampler.lifetime = 1e-9;
  est.sampler.window = AxisBox{Vec{0.0}, Vec{1.0}};
  est.n_trees = 1;
  const RiskEstimate r = estimate_risk(est, lin, "uniform-cube", 4000, 400, 6, 21);
  CHECK(std::abs(r.mse - 1.0 / 12.0) <= 3.0 * r.stderr_ + 0.01);
  CHECK(r.n_test == 400);
  CHECK(r.replicates == 6);
}

TEST_CASE("estimate_risk: deterministic in seed and thread count") {
  const RidgeTarget lin(row_matrix({1.0, 1.0}), "sine", 0.2);
  EstimatorSpec est;
  est.sampler.lifetime = 5.0;
  est.sampler.window = AxisBox{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
  est.n_trees = 4;
  const RiskEstimate a = estimate_risk(est, lin, "uniform-cube", 500, 200, 5, 99);
  const RiskEstimate b = estimate_risk(est, lin, "uniform-cube", 500, 200, 5, 99);
  const RiskEstimate c = estimate_risk(est, lin, "uniform-cube", 500, 200, 5, 99, 3);
  CHECK(a.mse == b.mse);
  CHECK(a.mse == c.mse);
  CHECK(a.stderr_ == c.stderr_);
  const RiskEstimate d = estimate_risk(est, lin, "uniform-cube", 500, 200, 5, 100);
  CHECK(a.mse != d.mse);

  CHECK_THROWS_AS(estimate_risk(est, lin, "uniform-cube", 0, 200, 5, 1), ConfigError);
  CHECK_THROWS_AS(estimate_risk(est, lin, "uniform-cube", 500, 0, 5, 1), ConfigError);
  CHECK_THROWS_AS(estimate_risk(est, lin, "uniform-cube", 500, 200, 0, 1), ConfigError);
  EstimatorSpec none = est;
  none.n_trees = 0;
  CHECK_THROWS_AS(estimate_risk(none, lin, "uniform-cube", 500, 200, 5, 1), ConfigError);
}

namespace {

// Hand-rolled 1D Mondrian forest, written from the definition with the
// standard library RNG.  Shares no code with the library estimator.
void naive_cuts(double lo, double hi, double budget, std::mt19937_64& g,
                std::vector<double>& cuts) {
  std::exponential_distribution<double> life(hi - lo);
  const double t = life(g);
  if (t > budget) return;
  std::uniform_real_distribution<double> at(lo, hi);
  const double c = at(g);
  naive_cuts(lo, c, budget - t, g, cuts);
  cuts.push_back(c);
  naive_cuts(c, hi, budget - t, g, cuts);
}

struct NaiveTree {
  std::vector<double> cuts;  // sorted interior cut positions
  std::vector<double> sum;
  std::vector<std::size_t> cnt;

  std::size_t seg(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }
  double predict(double x) const {
    const std::size_t s = seg(x);
    return cnt[s] == 0 ? 0.0 : sum[s] / static_cast<double>(cnt[s]);
  }
};

double naive_forest_mse(double lambda, std::size_t m_trees, std::size_t n_train,
                        std::size_t n_test, std::mt19937_64& g) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> xs(n_train);
  for (auto& x : xs) x = unif(g);

  std::vector<NaiveTree> trees(m_trees);
  for (auto& tree : trees) {
    naive_cuts(0.0, 1.0, lambda, g, tree.cuts);
    std::sort(tree.cuts.begin(), tree.cuts.end());
    tree.sum.assign(tree.cuts.size() + 1, 0.0);
    tree.cnt.assign(tree.cuts.size() + 1, 0);
    for (double x : xs) {
      const std::size_t s = tree.seg(x);
      tree.sum[s] += x;  // y = x, noise-free
      ++tree.cnt[s];
    }
  }

  double acc = 0.0;
  for (std::size_t t = 0; t < n_test; ++t) {
    const double x = unif(g);
    double p = 0.0;
    for (const auto& tree : trees) p += tree.predict(x);
    p /= static_cast<double>(m_trees);
    acc += (p - x) * (p - x);
  }
  return acc / static_cast<double>(n_test);
}

}  // namespace

TEST_CASE("estimate_risk agrees with a hand-rolled 1d mondrian forest") {
  const double lambda = 20.0;
  const std::size_t m_trees = 16, n_train = 10000, n_test = 400, reps = 8;

  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.0);
  EstimatorSpec est;
  est.sampler.lifetime = lambda;
  est.sampler.window = AxisBox{Vec{0.0}, Vec{1.0}};
  est.n_trees = m_trees;
  const RiskEstimate lib =
      estimate_risk(est, lin, "uniform-cube", n_train, n_test, reps, 4242);

  std::mt19937_64 g(171717);
  std::vector<double> naive(reps, 0.0);
  for (auto& v : naive) v = naive_forest_mse(lambda, m_trees, n_train, n_test, g);

  const double pooled = std::sqrt(lib.stderr_ * lib.stderr_ +
                                  stderr_of_mean(naive) * stderr_of_mean(naive));
  CHECK(std::abs(lib.mse - mean(naive)) <= 3.0 * pooled);
}

TEST_CASE("ols slope recovery on synthetic power-law risks") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> noise(0.0, 0.03);
  Vec lx, ly;
  for (double n : {100.0, 316.0, 1000.0, 3160.0, 10000.0, 31600.0, 100000.0}) {
    lx.push_back(std::log10(n));
    ly.push_back(std::log10(3.0) - 0.65 * std::log10(n) + noise(g));
  }
  const OlsFit fit = ols_fit(lx, ly);
  CHECK(std::abs(fit.slope + 0.65) <= 3.0 * fit.slope_stderr);
  CHECK(fit.slope_stderr < 0.05);
}

TEST_CASE("rate_experiment validates its grid") {
  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.1);
  RateConfig cfg;
  cfg.family = "mondrian";
  cfg.mu = "uniform-cube";
  cfg.grid_n = {100, 300, 1000};
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.grid_n = {100, 1000, 300, 3200};
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.grid_n = {100, 200, 400, 800};  // only 0.9 decades
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.grid_n = {100, 300, 1000, 3200};
  cfg.multiplier_grid = {};
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.multiplier_grid = {1.0};
  cfg.family = "oblique";  // no feature matrix supplied
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.family = "forest";
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
  cfg.family = "mondrian";
  cfg.rule = "c9";
  CHECK_THROWS_AS(rate_experiment(cfg, lin, 1), ConfigError);
}

TEST_CASE("rate_experiment: 1d families both track the n^{-2/3} rate") {
  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.1);
  RateConfig cfg;
  cfg.grid_n = {200, 600, 2000, 6400};
  cfg.rule = "c1";
  cfg.m_trees = 4;
  cfg.replicates = 6;
  cfg.n_test = 200;
  cfg.mu = "uniform-cube";
  cfg.multiplier_grid = {0.5, 1.0, 2.0};

  cfg.family = "mondrian";
  const RateFit mf = rate_experiment(cfg, lin, 31);
  REQUIRE(mf.grid.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(mf.grid[i].n == cfg.grid_n[i]);
    CHECK(mf.grid[i].m_trees >= cfg.m_trees);
    if (i > 0) CHECK(mf.grid[i].lambda > mf.grid[i - 1].lambda);
  }
  const bool tuned = std::find(cfg.multiplier_grid.begin(), cfg.multiplier_grid.end(),
                               mf.multiplier) != cfg.multiplier_grid.end();
  CHECK(tuned);
  CHECK(mf.slope < -0.3);
  CHECK(std::abs(mf.slope + 2.0 / 3.0) < 0.3);

  cfg.family = "oblique";
  cfg.feature_matrix = row_matrix({1.0});  // d = m = 1
  const RateFit of = rate_experiment(cfg, lin, 31);
  CHECK(std::abs(of.slope + 2.0 / 3.0) < 0.3);
  // Same effective dimension, so the fitted exponents agree.
  CHECK(std::abs(of.slope - mf.slope) <=
        3.0 * std::sqrt(of.slope_stderr * of.slope_stderr +
                        mf.slope_stderr * mf.slope_stderr) + 0.1);

  const RateFit again = rate_experiment(cfg, lin, 31);
  CHECK(again.slope == of.slope);
  CHECK(again.multiplier == of.multiplier);
}

TEST_CASE("suboptimality closed form: frozen values") {
  // d=2, a=(1,1), lambda=10, w=(1/2,1/2), sigma=0: pure bias
  const SuboptimalityBound b1 = suboptimality_closed_form({1.0, 1.0}, 10.0, {0.5, 0.5}, 0.0, 100);
  CHECK(b1.bias == doctest::Approx(0.0224).epsilon(1e-12));
  CHECK(b1.variance == 0.0);
  CHECK(b1.total == doctest::Approx(0.0224).epsilon(1e-12));
  CHECK_FALSE(b1.vacuous_bias);

  // sigma=1, lambda=1, d=1: variance sigma^2 (n/(2 lambda) + 1)^{-1} = 1/2 at n=2
  const SuboptimalityBound b2 = suboptimality_closed_form({1.0}, 1.0, {1.0}, 1.0, 2);
  CHECK(b2.variance == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b2.vacuous_bias);  // 1 - 2 - 1 < 0 at lambda w = 1
  CHECK(b2.bias == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(b2.total == doctest::Approx(-0.5).epsilon(1e-12));

  // lambda w_2 = 1.5 < 1 + sqrt(2): the second axis factor goes negative
  const SuboptimalityBound b3 =
      suboptimality_closed_form({1.0, 1.0}, 5.0, {0.7, 0.3}, 0.1, 10000);
  CHECK(b3.vacuous_bias);
  const SuboptimalityBound b4 =
      suboptimality_closed_form({1.0, 1.0}, 10.0, {0.7, 0.3}, 0.1, 10000);
  CHECK_FALSE(b4.vacuous_bias);

  CHECK_THROWS_AS(suboptimality_closed_form({1.0, 0.0}, 10.0, {0.5, 0.5}, 0.1, 100),
                  InvalidTarget);
  CHECK_THROWS_AS(suboptimality_closed_form({1.0, 1.0}, 10.0, {0.5}, 0.1, 100),
                  DimensionMismatch);
  CHECK_THROWS_AS(suboptimality_closed_form({1.0, 1.0}, 10.0, {0.6, 0.6}, 0.1, 100),
                  ConfigError);
  CHECK_THROWS_AS(suboptimality_closed_form({1.0, 1.0}, -1.0, {0.5, 0.5}, 0.1, 100),
                  ConfigError);
}

TEST_CASE("suboptimality_check: empirical single-tree risk clears the bound") {
  const SuboptimalityCell cell =
      suboptimality_check({1.0, 1.0}, 10.0, {0.5, 0.5}, 0.1, 10000, 16, 77);
  CHECK(cell.pass);
  CHECK_FALSE(cell.vacuous_bias);
  CHECK(cell.lower_bound == doctest::Approx(0.0224 + 0.01 / 101.0).epsilon(1e-9));
  CHECK(cell.empirical_risk > 0.015);
  const SuboptimalityCell again =
      suboptimality_check({1.0, 1.0}, 10.0, {0.5, 0.5}, 0.1, 10000, 16, 77, 2);
  CHECK(again.empirical_risk == cell.empirical_risk);
}

TEST_CASE("estimate_bias: single cell gives Var(f(X)), bias shrinks with lambda") {
  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.0);
  SamplerSpec sp;
  sp.lifetime = 1e-9;
  sp.window = AxisBox{Vec{0.0}, Vec{1.0}};
  const BiasEstimate one = estimate_bias(lin, sp, "uniform-cube", 4000, 2000, 6, 5);
  CHECK(std::abs(one.value - 1.0 / 12.0) <= 3.0 * one.stderr_ + 0.01);

  sp.lifetime = 2.0;
  const BiasEstimate coarse = estimate_bias(lin, sp, "uniform-cube", 4000, 2000, 10, 6);
  sp.lifetime = 10.0;
  const BiasEstimate fine = estimate_bias(lin, sp, "uniform-cube", 4000, 2000, 10, 6);
  CHECK(fine.value < coarse.value);

  SamplerSpec bare;
  CHECK_THROWS_AS(estimate_bias(lin, bare, "uniform-cube", 100, 100, 2, 1), ConfigError);
  CHECK_THROWS_AS(estimate_bias(lin, sp, "uniform-cube", 0, 100, 2, 1), ConfigError);
}

TEST_CASE("bias_experiment: Erlang diameter bound holds on a lifetime grid") {
  const std::vector<BiasRow> rows = bias_experiment(1, {2.0, 5.0, 10.0}, 4000, 2000, 8, 11);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].bound == doctest::Approx(6.0 / 25.0).epsilon(1e-12));
  for (const BiasRow& row : rows) {
    CHECK(row.pass);
    CHECK(row.value >= 0.0);
  }
  const std::vector<BiasRow> d2 = bias_experiment(2, {5.0}, 3000, 1500, 6, 12);
  CHECK(d2[0].bound == doctest::Approx(24.0 / 25.0).epsilon(1e-12));
  CHECK(d2[0].pass);
}

TEST_CASE("risk dominates bias for a noise-free single tree") {
  const RidgeTarget lin(row_matrix({1.0}), "linear", 0.0);
  SamplerSpec sp;
  sp.lifetime = 5.0;
  sp.window = AxisBox{Vec{0.0}, Vec{1.0}};
  const BiasEstimate bias = estimate_bias(lin, sp, "uniform-cube", 20000, 4000, 8, 3);
  EstimatorSpec est;
  est.sampler = sp;
  est.n_trees = 1;
  const RiskEstimate risk = estimate_risk(est, lin, "uniform-cube", 2000, 1000, 8, 3);
  const double pooled =
      std::sqrt(bias.stderr_ * bias.stderr_ + risk.stderr_ * risk.stderr_);
  CHECK(risk.mse >= bias.value - 3.0 * pooled);
}

TEST_CASE("geometry_suite: every check passes, deterministically") {
  const std::vector<GeometryRow> rows = geometry_suite(2468);
  REQUIRE(rows.size() == 11);
  std::vector<std::string> ids;
  for (const GeometryRow& row : rows) {
    INFO(row.check_id, ": estimate ", row.estimate, " vs ", row.bound_or_target);
    CHECK(row.pass);
    ids.push_back(row.check_id);
  }
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

  const std::vector<GeometryRow> threaded = geometry_suite(2468, 4);
  REQUIRE(threaded.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(threaded[i].check_id == rows[i].check_id);
    CHECK(threaded[i].estimate == rows[i].estimate);
  }
}

TEST_CASE("equivalence_experiment: both routes agree on co-membership") {
  const std::vector<EquivalenceRow> rows = equivalence_experiment(1500, 97);
  REQUIRE(rows.size() == 9);
  for (const EquivalenceRow& row : rows) {
    INFO(row.config_id, " pair ", row.pair_id, ": ", row.p_direct, " vs ", row.p_lifted);
    CHECK(row.pass);
    CHECK(row.p_direct > 0.0);
    CHECK(row.p_direct < 1.0);
  }
  CHECK(rows[0].config_id == "axis_d2");
  CHECK(rows[3].config_id == "oblique_d2_m3");
  CHECK(rows[6].config_id == "oblique_d3_m3");
  CHECK_THROWS_AS(equivalence_experiment(0, 1), ConfigError);
}

TEST_CASE("csv writers: stable bytes, headers, atomic temp cleanup") {
  RateFit fit;
  fit.grid.push_back({1000, 10.0, 16, 0.125, 0.001});
  fit.grid.push_back({3000, 14.0, 16, 0.0625, 0.0005});
  fit.slope = -0.66;
  fit.intercept = 0.9;
  const std::string rates = "labx_rates_test.csv";
  write_rates_csv(rates, fit);
  const std::string once = slurp(rates);
  CHECK(once.rfind("n,lambda,M,risk,stderr\n", 0) == 0);
  CHECK(once.find("1000,10,16,0.125,0.001\n") != std::string::npos);
  write_rates_csv(rates, fit);
  CHECK(slurp(rates) == once);
  CHECK_FALSE(std::ifstream(rates + ".tmp").good());
  std::remove(rates.c_str());

  SuboptimalityCell cell;
  cell.lambda = 10.0;
  cell.weights = {0.5, 0.5};
  cell.empirical_risk = 0.023;
  cell.stderr_ = 0.001;
  cell.lower_bound = 0.0225;
  cell.pass = true;
  const std::string sub = "labx_subopt_test.csv";
  write_suboptimality_csv(sub, {cell});
  const std::string stext = slurp(sub);
  CHECK(stext.rfind("lambda,w1,w2,empirical_risk,stderr,lower_bound,pass\n", 0) == 0);
  CHECK(stext.find(",1\n") != std::string::npos);
  std::remove(sub.c_str());

  GeometryRow grow;
  grow.check_id = "zero_cell_mean_volume";
  grow.estimate = 3.97;
  grow.bound_or_target = 4.0;
  grow.pass = true;
  const std::string geo = "labx_geometry_test.csv";
  write_geometry_csv(geo, {grow});
  CHECK(slurp(geo).rfind("check_id,estimate,stderr,bound_or_target,pass\n", 0) == 0);
  std::remove(geo.c_str());

  EquivalenceRow erow;
  erow.config_id = "axis_d2";
  erow.pair_id = 2;
  erow.p_direct = 0.3125;
  erow.p_lifted = 0.25;
  erow.stderr_pooled = 0.0078125;
  erow.pass = true;
  const std::string eq = "labx_equiv_test.csv";
  write_equivalence_csv(eq, {erow});
  CHECK(slurp(eq).find("axis_d2,2,0.3125,0.25,0.0078125,1\n") != std::string::npos);
  std::remove(eq.c_str());

  BiasRow brow;
  brow.lambda = 5.0;
  brow.value = 0.016;
  brow.bound = 0.24;
  brow.pass = true;
  const std::string bias = "labx_bias_test.csv";
  write_bias_csv(bias, {brow});
  CHECK(slurp(bias).rfind("lambda,bias,stderr,bound,pass\n", 0) == 0);
  std::remove(bias.c_str());

  const std::string svg = "labx_rates_test.svg";
  write_rates_plot(svg, {{"oblique", fit}});
  const std::string image = slurp(svg);
  CHECK(image.find("<svg") != std::string::npos);
  CHECK(image.find("oblique") != std::string::npos);
  CHECK(image.find("slope") != std::string::npos);
  std::remove(svg.c_str());
}
