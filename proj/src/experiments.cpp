#include "stitforest/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "stitforest/csvio.hpp"
#include "stitforest/errors.hpp"
#include "stitforest/mondrian.hpp"
#include "stitforest/parallel.hpp"
#include "stitforest/stats.hpp"
#include "stitforest/stit.hpp"
#include "stitforest/zonotope.hpp"

namespace stitforest {

namespace {

// Stream tags keep every experiment on its own slice of the counter space.
constexpr std::uint64_t kRiskTag = 0x7269736b;
constexpr std::uint64_t kTuneTag = 0x74756e65;
constexpr std::uint64_t kGridTag = 0x67726964;
constexpr std::uint64_t kGeomTag = 0x67656f6d;
constexpr std::uint64_t kBiasTag = 0x62696173;
constexpr std::uint64_t kEquivTag = 0x65717576;
constexpr std::uint64_t kSuboptTag = 0x73756274;

double spread(std::span<const double> xs) {
  return xs.size() >= 2 ? stderr_of_mean(xs) : 0.0;
}

}  // namespace

RiskEstimate estimate_risk(const EstimatorSpec& est, const RidgeTarget& target,
                           const std::string& mu, std::size_t n_train, std::size_t n_test,
                           std::size_t replicates, std::uint64_t seed, unsigned threads) {
  if (n_train == 0 || n_test == 0 || replicates == 0)
    throw ConfigError("risk estimation needs positive train/test/replicate counts");
  if (est.n_trees == 0) throw ConfigError("a forest needs at least one tree");
  const std::size_t d = target.dim();

  std::vector<double> rep_mse(replicates, 0.0);
  parallel_for(replicates, threads, [&](std::size_t r) {
    Rng root = Rng::stream(seed, {kRiskTag, r});
    Rng data_rng = root.child(1);
    const Dataset data = sample_dataset(target, mu, n_train, data_rng);
    const std::uint64_t forest_seed = root.child(2).next_u64();
    const ForestModel forest = fit_forest(data, est.sampler, est.n_trees, forest_seed);
    Rng test_rng = root.child(3);
    double acc = 0.0;
    for (std::size_t t = 0; t < n_test; ++t) {
      const Vec x = sample_mu_point(mu, d, test_rng);
      const double e = forest.predict(x) - target.value(x);
      acc += e * e;
    }
    rep_mse[r] = acc / static_cast<double>(n_test);
  });

  RiskEstimate out;
  out.mse = mean(rep_mse);
  out.stderr_ = spread(rep_mse);
  out.n_test = n_test;
  out.replicates = replicates;
  return out;
}

RateFit rate_experiment(const RateConfig& cfg, const RidgeTarget& target, std::uint64_t seed,
                        unsigned threads) {
  if (cfg.grid_n.size() < 4) throw ConfigError("rate grids need at least 4 sample sizes");
  if (!std::is_sorted(cfg.grid_n.begin(), cfg.grid_n.end()) || cfg.grid_n.front() == 0 ||
      cfg.grid_n.front() == cfg.grid_n.back())
    throw ConfigError("rate grid must be strictly increasing");
  const double decades = std::log10(static_cast<double>(cfg.grid_n.back()) /
                                    static_cast<double>(cfg.grid_n.front()));
  if (decades < 1.5 - 1e-9) throw ConfigError("rate grid must span at least 1.5 decades");
  if (cfg.multiplier_grid.empty()) throw ConfigError("multiplier grid is empty");
  for (double m : cfg.multiplier_grid)
    if (!(m > 0.0)) throw ConfigError("multipliers must be positive");

  const std::size_t d = target.dim();
  SamplerSpec base;
  base.window = mu_window(cfg.mu, d);
  std::size_t s_eff = d;
  double eps = 0.0;
  if (cfg.family == "oblique") {
    if (!cfg.feature_matrix)
      throw ConfigError("the oblique family needs a feature matrix");
    const FeatureMatrix a(*cfg.feature_matrix);
    if (a.dim() != d) throw DimensionMismatch("feature matrix rows do not match the target");
    base.kind = SamplerSpec::Kind::oblique;
    base.feature_matrix = cfg.feature_matrix;
    s_eff = target.ridge_dim();
    eps = perp_norm21(a, target.subspace());
  } else if (cfg.family == "mondrian") {
    base.kind = SamplerSpec::Kind::mondrian;
  } else {
    throw ConfigError("unknown estimator family: " + cfg.family);
  }

  const auto schedule_at = [&](std::size_t n, double mult) {
    return lifetime_schedule(cfg.rule, n, s_eff, d, target.beta(), target.lipschitz(), eps,
                             mult);
  };
  const auto estimator_at = [&](const LifetimeSchedule& sc) {
    EstimatorSpec est;
    est.sampler = base;
    est.sampler.lifetime = sc.lambda;
    est.n_trees = std::max(cfg.m_trees, sc.tree_floor);
    return est;
  };

  RateFit fit;
  // Tune the lifetime constant at the cheapest grid point, then freeze it.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mi = 0; mi < cfg.multiplier_grid.size(); ++mi) {
    const double mult = cfg.multiplier_grid[mi];
    const LifetimeSchedule sc = schedule_at(cfg.grid_n.front(), mult);
    const std::uint64_t tune_seed = Rng::stream(seed, {kTuneTag, mi}).next_u64();
    const RiskEstimate r = estimate_risk(estimator_at(sc), target, cfg.mu, cfg.grid_n.front(),
                                         cfg.n_test, cfg.replicates, tune_seed, threads);
    if (r.mse < best) {
      best = r.mse;
      fit.multiplier = mult;
    }
  }

  Vec lx, ly;
  for (std::size_t i = 0; i < cfg.grid_n.size(); ++i) {
    const LifetimeSchedule sc = schedule_at(cfg.grid_n[i], fit.multiplier);
    const EstimatorSpec est = estimator_at(sc);
    const std::uint64_t grid_seed = Rng::stream(seed, {kGridTag, i}).next_u64();
    const RiskEstimate r = estimate_risk(est, target, cfg.mu, cfg.grid_n[i], cfg.n_test,
                                         cfg.replicates, grid_seed, threads);
    fit.grid.push_back({cfg.grid_n[i], sc.lambda, est.n_trees, r.mse, r.stderr_});
    lx.push_back(std::log10(static_cast<double>(cfg.grid_n[i])));
    ly.push_back(std::log10(std::max(r.mse, 1e-300)));
  }
  const OlsFit line = ols_fit(lx, ly);
  fit.slope = line.slope;
  fit.slope_stderr = line.slope_stderr;
  fit.intercept = line.intercept;
  return fit;
}

Mat aligned_feature_matrix(const SubspaceSpec& sub, double epsilon) {
  const std::size_t d = sub.ambient_dim();
  const std::size_t s = sub.dim();
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < s; ++i) {
    Vec row(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) row[j] = sub.basis.at(i, j);
    rows.push_back(std::move(row));
  }
  for (std::size_t e = 0; e < d && rows.size() < d; ++e) {
    Vec cand(d, 0.0);
    cand[e] = 1.0;
    for (const Vec& b : rows) {
      double proj = 0.0;
      for (std::size_t j = 0; j < d; ++j) proj += b[j] * cand[j];
      for (std::size_t j = 0; j < d; ++j) cand[j] -= proj * b[j];
    }
    double sq = 0.0;
    for (double c : cand) sq += c * c;
    if (sq < 1e-16) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& c : cand) c *= inv;
    rows.push_back(std::move(cand));
  }

  Mat a(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double scale = j < s ? 1.0 : epsilon;
    for (std::size_t i = 0; i < d; ++i) a.at(i, j) = scale * rows[j][i];
  }
  return a;
}

SuboptimalityBound suboptimality_closed_form(const Vec& a, double lambda, const Vec& weights,
                                             double noise_sd, std::size_t n) {
  const std::size_t d = a.size();
  if (d == 0 || weights.size() != d)
    throw DimensionMismatch("signal and weight dimensions differ");
  if (!(lambda > 0.0) || n == 0 || noise_sd < 0.0)
    throw ConfigError("bad lower-bound inputs");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ConfigError("weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("weights must sum to 1");

  SuboptimalityBound out;
  double wprod = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == 0.0) throw InvalidTarget("the lower bound needs a_i != 0 on every axis");
    const double lw = lambda * weights[i];
    const double factor = 1.0 - 2.0 / lw - 1.0 / (lw * lw);
    if (factor <= 0.0) out.vacuous_bias = true;
    out.bias += a[i] * a[i] / (2.0 * lw * lw) * factor;
    wprod *= weights[i];
  }
  const double cells = std::pow(2.0, static_cast<double>(d)) *
                       std::pow(lambda, static_cast<double>(d)) * wprod;
  out.variance = noise_sd * noise_sd / (static_cast<double>(n) / cells + 1.0);
  out.total = out.bias + out.variance;
  return out;
}

SuboptimalityCell suboptimality_check(const Vec& a, double lambda, const Vec& weights,
                                      double noise_sd, std::size_t n, std::size_t replicates,
                                      std::uint64_t seed, unsigned threads) {
  const SuboptimalityBound bound = suboptimality_closed_form(a, lambda, weights, noise_sd, n);
  const std::size_t d = a.size();
  Mat arow(1, d);
  for (std::size_t i = 0; i < d; ++i) arow.at(0, i) = a[i];
  const RidgeTarget target(arow, "linear", noise_sd);

  EstimatorSpec est;
  est.sampler.kind = SamplerSpec::Kind::mondrian;
  est.sampler.lifetime = lambda;
  est.sampler.weights = weights;
  est.sampler.window = AxisBox{Vec(d, 0.0), Vec(d, 1.0)};
  est.n_trees = 1;
  const std::uint64_t risk_seed = Rng::stream(seed, {kSuboptTag}).next_u64();
  const RiskEstimate r =
      estimate_risk(est, target, "uniform-cube", n, 512, replicates, risk_seed, threads);

  SuboptimalityCell cell;
  cell.lambda = lambda;
  cell.weights = weights;
  cell.empirical_risk = r.mse;
  cell.stderr_ = r.stderr_;
  cell.lower_bound = bound.total;
  cell.vacuous_bias = bound.vacuous_bias;
  cell.pass = r.mse >= bound.total - 3.0 * r.stderr_;
  return cell;
}

namespace {

GeometryRow deter_row(const char* id, std::size_t d, std::size_t m, std::size_t k, Rng& rng) {
  // Seeded draw of a normalized feature matrix and a line through the origin,
  // redrawn until the projected spectrum is comfortably nondegenerate.
  std::optional<FeatureMatrix> fm;
  SubspaceSpec sub = SubspaceSpec::coordinate(1, d);
  double sig = 0.0;
  while (!(sig > 0.05)) {
    Mat a(d, m);
    for (auto& v : a.data) v = rng.normal();
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) sq += a.at(i, j) * a.at(i, j);
      total += std::sqrt(sq);
    }
    if (!(total > 0.0)) continue;
    for (auto& v : a.data) v /= total;
    try {
      fm.emplace(a);
      Mat line(1, d);
      for (auto& v : line.data) v = rng.normal();
      sub = SubspaceSpec::from_rows(line);
    } catch (const RankDeficient&) {
      continue;
    }
    sig = sigma_s(*fm, sub);
  }

  const std::size_t reps = 4000;
  const Vec u_sub{1.0};
  std::vector<double> vals(reps, 0.0);
  for (auto& v : vals) {
    const HPolytope cell = oblique_zero_cell(*fm, 1.0, rng);
    const double w = projected_width(cell, sub.basis, u_sub);
    v = std::pow(w, static_cast<double>(k));
  }

  GeometryRow row;
  row.check_id = id;
  row.estimate = mean(vals);
  row.stderr_ = spread(vals);
  row.bound_or_target = deter_bound(m, d, sig, k).proof;
  row.pass = row.estimate <= row.bound_or_target + 3.0 * row.stderr_;
  return row;
}

}  // namespace

std::vector<GeometryRow> geometry_suite(std::uint64_t seed, unsigned threads) {
  using Task = std::function<GeometryRow(Rng&)>;
  std::vector<Task> tasks;

  tasks.push_back([](Rng& rng) {
    const WeightedMondrianSpec spec{Vec{0.5, 0.5}, 2.0};
    std::vector<double> vols(20000, 0.0);
    for (auto& v : vols) v = zero_cell_sample(spec, rng).volume();
    GeometryRow row;
    row.check_id = "zero_cell_mean_volume";
    row.estimate = mean(vols);
    row.stderr_ = spread(vols);
    row.bound_or_target = 4.0;  // 2^d / (lambda^d prod w)
    row.pass = std::abs(row.estimate - row.bound_or_target) <= 3.0 * row.stderr_;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    const WeightedMondrianSpec spec{Vec{0.5, 0.5}, 2.0};
    const std::size_t reps = 5000;
    std::vector<double> sides(reps, 0.0);
    for (auto& s : sides) s = zero_cell_sample(spec, rng).side(0);
    GeometryRow row;
    row.check_id = "zero_cell_side_ks";
    row.estimate = ks_one_sample(sides, [](double x) { return gamma2_cdf(x, 1.0); });
    row.bound_or_target = ks_one_sample_critical(0.01, reps);
    row.pass = row.estimate < row.bound_or_target;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    // Mean volume of interior cells in a large window against 1 / vol(zonoid).
    const double side = 60.0;
    const AxisBox window{Vec{0.0, 0.0}, Vec{side, side}};
    const WeightedMondrianSpec spec{Vec{0.5, 0.5}, 1.0};
    const std::size_t reps = 24;
    std::vector<double> per_rep(reps, 0.0);
    for (auto& v : per_rep) {
      const TessellationTree tree = mondrian_sample(window, spec, rng);
      double acc = 0.0;
      std::size_t cnt = 0;
      for (const AxisBox& box : leaf_boxes(tree)) {
        bool interior = true;
        for (std::size_t i = 0; i < 2; ++i)
          if (box.lo[i] <= 1e-9 || box.hi[i] >= side - 1e-9) interior = false;
        if (!interior) continue;
        acc += box.volume();
        ++cnt;
      }
      v = acc / static_cast<double>(cnt);
    }
    const DirectionalDistribution phi =
        DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{0.5, 0.5});
    GeometryRow row;
    row.check_id = "campbell_mean_cell_volume";
    row.estimate = mean(per_rep);
    row.stderr_ = spread(per_rep);
    row.bound_or_target = 1.0 / zonotope_volume(phi.zonoid());
    row.pass = std::abs(row.estimate - row.bound_or_target) <= 0.1 * row.bound_or_target;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    const TailMomentCheck check =
        projected_zero_cell_diameter_stats(Vec{1.0}, {0}, 1, 0.0, 20000, rng);
    GeometryRow row;
    row.check_id = "erlang_diameter_k1";
    row.estimate = check.estimate;
    row.stderr_ = check.stderr_;
    row.bound_or_target = check.bound;
    // Equality case: s = 1 with unit weight, so test two-sided.
    row.pass = std::abs(check.estimate - check.bound) <= 3.0 * check.stderr_;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    const TailMomentCheck check =
        projected_zero_cell_diameter_stats(Vec{1.0}, {0}, 2, 0.0, 20000, rng);
    GeometryRow row;
    row.check_id = "erlang_diameter_k2";
    row.estimate = check.estimate;
    row.stderr_ = check.stderr_;
    row.bound_or_target = check.bound;
    row.pass = std::abs(check.estimate - check.bound) <= 3.0 * check.stderr_;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    const TailMomentCheck check =
        projected_zero_cell_diameter_stats(Vec{0.3, 0.7}, {0, 1}, 1, 0.0, 20000, rng);
    GeometryRow row;
    row.check_id = "erlang_weighted_k1";
    row.estimate = check.estimate;
    row.stderr_ = check.stderr_;
    row.bound_or_target = check.bound;
    row.pass = check.pass;
    return row;
  });

  tasks.push_back([](Rng& rng) { return deter_row("deter_d2_m3_k1", 2, 3, 1, rng); });
  tasks.push_back([](Rng& rng) { return deter_row("deter_d2_m3_k2", 2, 3, 2, rng); });
  tasks.push_back([](Rng& rng) { return deter_row("deter_d3_m4_k1", 3, 4, 1, rng); });

  tasks.push_back([](Rng& rng) {
    const DirectionalDistribution phi =
        DirectionalDistribution::discrete({Vec{1.0, 0.0}, Vec{0.0, 1.0}}, Vec{0.5, 0.5});
    const ScalingCheck check = scaling_check(phi, 4.0, 2, 5000, 0.01, rng);
    GeometryRow row;
    row.check_id = "scaling_axis_ks";
    row.estimate = check.ks_stat;
    row.bound_or_target = check.ks_critical;
    row.pass = check.pass;
    return row;
  });

  tasks.push_back([](Rng& rng) {
    const double r = std::sqrt(0.5);
    const DirectionalDistribution phi = DirectionalDistribution::discrete(
        {Vec{1.0, 0.0}, Vec{0.0, 1.0}, Vec{r, r}}, Vec{0.4, 0.3, 0.3});
    const ScalingCheck check = scaling_check(phi, 4.0, 2, 5000, 0.01, rng);
    GeometryRow row;
    row.check_id = "scaling_oblique_ks";
    row.estimate = check.ks_stat;
    row.bound_or_target = check.ks_critical;
    row.pass = check.pass;
    return row;
  });

  std::vector<GeometryRow> rows(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, {kGeomTag, i});
    rows[i] = tasks[i](rng);
  });
  return rows;
}

BiasEstimate estimate_bias(const RidgeTarget& target, const SamplerSpec& sampler,
                           const std::string& mu, std::size_t n_mc, std::size_t n_eval,
                           std::size_t replicates, std::uint64_t seed, unsigned threads) {
  if (!sampler.window) throw ConfigError("bias estimation needs an explicit sampler window");
  if (n_mc == 0 || n_eval == 0 || replicates == 0)
    throw ConfigError("bias estimation needs positive counts");
  const std::size_t d = target.dim();
  if (sampler.window->dim() != d)
    throw DimensionMismatch("sampler window does not match the target dimension");

  std::vector<double> per_rep(replicates, 0.0);
  parallel_for(replicates, threads, [&](std::size_t r) {
    Rng root = Rng::stream(seed, {kBiasTag, r});
    Rng part_rng = root.child(1);
    Partition part = sample_partition(sampler, part_rng);
    const std::size_t leaves = static_cast<std::size_t>(part.tree.leaf_count());
    const TreeEstimator router(std::move(part.tree), std::move(part.lift), *sampler.window,
                               std::vector<std::int64_t>(leaves, 0), Vec(leaves, 0.0));

    std::vector<double> fsum(leaves, 0.0);
    std::vector<std::size_t> cnt(leaves, 0);
    Rng mc_rng = root.child(2);
    for (std::size_t i = 0; i < n_mc; ++i) {
      const Vec x = sample_mu_point(mu, d, mc_rng);
      const std::size_t leaf = static_cast<std::size_t>(router.route(x));
      fsum[leaf] += target.value(x);
      ++cnt[leaf];
    }

    Rng eval_rng = root.child(3);
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n_eval; ++i) {
      const Vec x = sample_mu_point(mu, d, eval_rng);
      const std::size_t leaf = static_cast<std::size_t>(router.route(x));
      if (cnt[leaf] == 0) continue;
      const double dev = target.value(x) - fsum[leaf] / static_cast<double>(cnt[leaf]);
      acc += dev * dev;
      ++used;
    }
    per_rep[r] = used == 0 ? 0.0 : acc / static_cast<double>(used);
  });

  BiasEstimate out;
  out.value = mean(per_rep);
  out.stderr_ = spread(per_rep);
  out.replicates = replicates;
  return out;
}

std::vector<BiasRow> bias_experiment(std::size_t dim, const Vec& lambda_grid, std::size_t n_mc,
                                     std::size_t n_eval, std::size_t replicates,
                                     std::uint64_t seed, unsigned threads) {
  if (dim == 0 || lambda_grid.empty()) throw ConfigError("bias experiment needs a grid");
  Mat arow(1, dim);
  arow.at(0, 0) = 1.0;
  const RidgeTarget target(arow, "linear", 0.0);
  const double dd = static_cast<double>(dim);

  std::vector<BiasRow> rows;
  for (std::size_t idx = 0; idx < lambda_grid.size(); ++idx) {
    const double lambda = lambda_grid[idx];
    if (!(lambda > 0.0)) throw ConfigError("lifetimes must be positive");
    SamplerSpec sp;
    sp.kind = SamplerSpec::Kind::mondrian;
    sp.lifetime = lambda;
    sp.window = AxisBox{Vec(dim, 0.0), Vec(dim, 1.0)};
    const std::uint64_t cell_seed = Rng::stream(seed, {kBiasTag, 1000 + idx}).next_u64();
    const BiasEstimate b = estimate_bias(target, sp, "uniform-cube", n_mc, n_eval, replicates,
                                         cell_seed, threads);
    BiasRow row;
    row.lambda = lambda;
    row.value = b.value;
    row.stderr_ = b.stderr_;
    // L^2 E[D(P_S Z_0)^2] with S the first axis at weight 1/d: Erlang second
    // moment Gamma(4)/Gamma(2) = 6 at rate lambda/d.
    const double l = target.lipschitz();
    row.bound = l * l * 6.0 * dd * dd / (lambda * lambda);
    row.pass = row.value <= row.bound + 3.0 * row.stderr_;
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct EquivConfig {
  std::string id;
  Mat a;  // d by m columns
  double lambda = 1.0;
  std::vector<std::pair<Vec, Vec>> pairs;
};

std::vector<EquivConfig> equivalence_configs() {
  std::vector<EquivConfig> cfgs;
  const std::vector<std::pair<Vec, Vec>> pairs2{
      {Vec{0.3, 0.4}, Vec{0.55, 0.7}},
      {Vec{0.1, 0.1}, Vec{0.2, 0.15}},
      {Vec{0.2, 0.8}, Vec{0.8, 0.2}},
  };
  {
    Mat a(2, 2);
    a.at(0, 0) = 1.0;
    a.at(1, 1) = 1.0;
    cfgs.push_back({"axis_d2", a, 2.0, pairs2});
  }
  {
    const double r = std::sqrt(0.5);
    Mat a(2, 3);
    a.at(0, 0) = 1.0;
    a.at(1, 1) = 1.0;
    a.at(0, 2) = r;
    a.at(1, 2) = r;
    cfgs.push_back({"oblique_d2_m3", a, 1.5, pairs2});
  }
  {
    Mat a(3, 3);
    a.at(0, 0) = 1.0;
    a.at(0, 1) = 0.6;
    a.at(1, 1) = 0.8;
    a.at(1, 2) = 0.6;
    a.at(2, 2) = 0.8;
    cfgs.push_back({"oblique_d3_m3", a, 2.0,
                    {{Vec{0.2, 0.3, 0.4}, Vec{0.5, 0.45, 0.6}},
                     {Vec{0.1, 0.9, 0.2}, Vec{0.3, 0.7, 0.35}},
                     {Vec{0.5, 0.5, 0.5}, Vec{0.6, 0.6, 0.6}}}});
  }
  return cfgs;
}

}  // namespace

std::vector<EquivalenceRow> equivalence_experiment(std::size_t replicates, std::uint64_t seed,
                                                   unsigned threads) {
  if (replicates == 0) throw ConfigError("equivalence needs replicates");
  const std::vector<EquivConfig> cfgs = equivalence_configs();
  const double rr = static_cast<double>(replicates);

  std::vector<std::vector<EquivalenceRow>> per_cfg(cfgs.size());
  parallel_for(cfgs.size(), threads, [&](std::size_t ci) {
    const EquivConfig& cfg = cfgs[ci];
    const std::size_t d = cfg.a.rows;
    const std::size_t np = cfg.pairs.size();
    const FeatureMatrix fm(cfg.a);
    const DirectionalDistribution phi = dirdist_from_matrix(fm);
    const HPolytope window = AxisBox{Vec(d, 0.0), Vec(d, 1.0)}.as_polytope();

    Mat pts(2 * np, d);
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t j = 0; j < d; ++j) {
        pts.at(2 * p, j) = cfg.pairs[p].first[j];
        pts.at(2 * p + 1, j) = cfg.pairs[p].second[j];
      }

    std::vector<std::size_t> same_direct(np, 0), same_lifted(np, 0);
    Rng direct_rng = Rng::stream(seed, {kEquivTag, ci, 0});
    for (std::size_t rep = 0; rep < replicates; ++rep) {
      const TessellationTree tree = stit_sample(window, phi, cfg.lambda, direct_rng);
      for (std::size_t p = 0; p < np; ++p)
        if (tree.locate(cfg.pairs[p].first) == tree.locate(cfg.pairs[p].second))
          ++same_direct[p];
    }
    Rng lift_rng = Rng::stream(seed, {kEquivTag, ci, 1});
    for (std::size_t rep = 0; rep < replicates; ++rep) {
      const LiftedPartition lp = lifted_partition(pts, fm, cfg.lambda, lift_rng, 5.0);
      for (std::size_t p = 0; p < np; ++p)
        if (lp.labels[2 * p] == lp.labels[2 * p + 1]) ++same_lifted[p];
    }

    for (std::size_t p = 0; p < np; ++p) {
      EquivalenceRow row;
      row.config_id = cfg.id;
      row.pair_id = p;
      row.p_direct = static_cast<double>(same_direct[p]) / rr;
      row.p_lifted = static_cast<double>(same_lifted[p]) / rr;
      row.stderr_pooled = std::sqrt(row.p_direct * (1.0 - row.p_direct) / rr +
                                    row.p_lifted * (1.0 - row.p_lifted) / rr);
      row.pass = std::abs(row.p_direct - row.p_lifted) <= 3.0 * row.stderr_pooled + 1e-12;
      per_cfg[ci].push_back(row);
    }
  });

  std::vector<EquivalenceRow> rows;
  for (auto& group : per_cfg)
    for (auto& row : group) rows.push_back(std::move(row));
  return rows;
}

void write_rates_csv(const std::string& path, const RateFit& fit) {
  CsvTable table;
  table.header = {"n", "lambda", "M", "risk", "stderr"};
  for (const RateFitRow& row : fit.grid)
    table.rows.push_back({std::to_string(row.n), fmt_full(row.lambda),
                          std::to_string(row.m_trees), fmt_full(row.risk),
                          fmt_full(row.stderr_)});
  write_csv_atomic(path, table);
}

void write_suboptimality_csv(const std::string& path,
                             const std::vector<SuboptimalityCell>& cells) {
  CsvTable table;
  const std::size_t d = cells.empty() ? 0 : cells.front().weights.size();
  table.header.push_back("lambda");
  for (std::size_t i = 0; i < d; ++i) table.header.push_back("w" + std::to_string(i + 1));
  table.header.insert(table.header.end(),
                      {"empirical_risk", "stderr", "lower_bound", "pass"});
  for (const SuboptimalityCell& cell : cells) {
    std::vector<std::string> row{fmt_full(cell.lambda)};
    for (double w : cell.weights) row.push_back(fmt_full(w));
    row.push_back(fmt_full(cell.empirical_risk));
    row.push_back(fmt_full(cell.stderr_));
    row.push_back(fmt_full(cell.lower_bound));
    row.push_back(cell.pass ? "1" : "0");
    table.rows.push_back(std::move(row));
  }
  write_csv_atomic(path, table);
}

void write_geometry_csv(const std::string& path, const std::vector<GeometryRow>& rows) {
  CsvTable table;
  table.header = {"check_id", "estimate", "stderr", "bound_or_target", "pass"};
  for (const GeometryRow& row : rows)
    table.rows.push_back({row.check_id, fmt_full(row.estimate), fmt_full(row.stderr_),
                          fmt_full(row.bound_or_target), row.pass ? "1" : "0"});
  write_csv_atomic(path, table);
}

void write_equivalence_csv(const std::string& path, const std::vector<EquivalenceRow>& rows) {
  CsvTable table;
  table.header = {"config_id", "pair_id", "p_direct", "p_lifted", "stderr_pooled", "pass"};
  for (const EquivalenceRow& row : rows)
    table.rows.push_back({row.config_id, std::to_string(row.pair_id), fmt_full(row.p_direct),
                          fmt_full(row.p_lifted), fmt_full(row.stderr_pooled),
                          row.pass ? "1" : "0"});
  write_csv_atomic(path, table);
}

void write_bias_csv(const std::string& path, const std::vector<BiasRow>& rows) {
  CsvTable table;
  table.header = {"lambda", "bias", "stderr", "bound", "pass"};
  for (const BiasRow& row : rows)
    table.rows.push_back({fmt_full(row.lambda), fmt_full(row.value), fmt_full(row.stderr_),
                          fmt_full(row.bound), row.pass ? "1" : "0"});
  write_csv_atomic(path, table);
}

void write_rates_plot(const std::string& path,
                      const std::vector<std::pair<std::string, RateFit>>& fits) {
  std::vector<LogLogSeries> series;
  for (const auto& [name, fit] : fits) {
    LogLogSeries s;
    s.name = name;
    for (const RateFitRow& row : fit.grid)
      s.points.emplace_back(static_cast<double>(row.n), std::max(row.risk, 1e-300));
    s.slope = fit.slope;
    s.intercept = fit.intercept;
    s.draw_fit = true;
    series.push_back(std::move(s));
  }
  write_loglog_svg(path, "risk vs sample size", "n", "risk", series);
}

}  // namespace stitforest
