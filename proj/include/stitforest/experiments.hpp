#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stitforest/forest.hpp"
#include "stitforest/oblique.hpp"
#include "stitforest/targets.hpp"

namespace stitforest {

struct EstimatorSpec {
  SamplerSpec sampler;
  std::size_t n_trees = 1;
};

struct RiskEstimate {
  double mse = 0.0;
  double stderr_ = 0.0;
  std::size_t n_test = 0;
  std::size_t replicates = 0;
};

// Per replicate: fresh training data, fresh forest, fresh test points; the
// squared error is measured against noise-free f.  Replicates run on
// independent streams, so results do not depend on the thread count.
RiskEstimate estimate_risk(const EstimatorSpec& est, const RidgeTarget& target,
                           const std::string& mu, std::size_t n_train, std::size_t n_test,
                           std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

struct RateFitRow {
  std::size_t n = 0;
  double lambda = 0.0;
  std::size_t m_trees = 1;
  double risk = 0.0;
  double stderr_ = 0.0;
};

struct RateFit {
  std::vector<RateFitRow> grid;
  double slope = 0.0;        // log10 risk vs log10 n
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double multiplier = 1.0;   // lifetime constant tuned at the smallest n, then frozen
};

struct RateConfig {
  std::vector<std::size_t> grid_n{1000, 3000, 10000, 30000, 100000};
  std::string rule = "c1";            // lifetime schedule rule
  std::string family = "oblique";     // oblique | mondrian
  std::optional<Mat> feature_matrix;  // oblique split directions (d by m)
  std::size_t m_trees = 16;
  std::size_t replicates = 20;
  std::size_t n_test = 400;
  std::string mu = "uniform-ball";
  Vec multiplier_grid{0.5, 1.0, 2.0, 4.0};
};

// Risks over the n-grid with lambda_n from the schedule; needs >= 4 grid
// points spanning >= 1.5 decades.  The mondrian family runs the schedule with
// s = d (no subspace to exploit by axis splits).
RateFit rate_experiment(const RateConfig& cfg, const RidgeTarget& target, std::uint64_t seed,
                        unsigned threads = 1);

// d by d feature matrix whose first s unit columns span the subspace, padded
// with an epsilon-scaled orthogonal completion so the column rank stays full:
// sigma_s(P_S A) = 1 and off-subspace mass (d - s) epsilon.
Mat aligned_feature_matrix(const SubspaceSpec& sub, double epsilon = 1e-8);

struct SuboptimalityBound {
  double bias = 0.0;          // sum of the per-axis terms, evaluated as stated
  double variance = 0.0;      // sigma^2 (n / (2^d lambda^d prod w) + 1)^{-1}
  double total = 0.0;
  bool vacuous_bias = false;  // some factor 1 - 2/(lw) - 1/(lw)^2 <= 0
};

// Single-tree risk lower bound for Y = <a, X> + noise on Uniform([0,1]^d).
// Throws InvalidTarget when some a_i = 0.
SuboptimalityBound suboptimality_closed_form(const Vec& a, double lambda, const Vec& weights,
                                             double noise_sd, std::size_t n);

struct SuboptimalityCell {
  double lambda = 0.0;
  Vec weights;
  double empirical_risk = 0.0;
  double stderr_ = 0.0;
  double lower_bound = 0.0;
  bool vacuous_bias = false;
  bool pass = false;  // empirical >= bound - 3 stderr
};

SuboptimalityCell suboptimality_check(const Vec& a, double lambda, const Vec& weights,
                                      double noise_sd, std::size_t n, std::size_t replicates,
                                      std::uint64_t seed, unsigned threads = 1);

struct GeometryRow {
  std::string check_id;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound_or_target = 0.0;
  bool pass = false;
};

// Zero-cell volume and side-law checks, the Campbell-window typical-cell
// volume, Erlang projected-diameter bounds (equality when s=1 and the
// selected weight is 1), deterministic-transform diameter bounds on seeded
// (A, S) draws, and scaling checks for one axis-aligned and one oblique
// directional distribution.
std::vector<GeometryRow> geometry_suite(std::uint64_t seed, unsigned threads = 1);

struct BiasEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t replicates = 0;
};

// MC estimate of E[(f(X) - fbar(X))^2] where fbar is the cell-conditional
// mean of f: per replicate, one partition, n_mc mu-draws to estimate leaf
// means of f, n_eval fresh draws to average the squared deviation.  The
// sampler needs an explicit window.
BiasEstimate estimate_bias(const RidgeTarget& target, const SamplerSpec& sampler,
                           const std::string& mu, std::size_t n_mc, std::size_t n_eval,
                           std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

struct EquivalenceRow {
  std::string config_id;
  std::size_t pair_id = 0;
  double p_direct = 0.0;   // co-membership under the direct oblique sampler
  double p_lifted = 0.0;   // under the transform route
  double stderr_pooled = 0.0;
  bool pass = false;       // |difference| <= 3 pooled stderr
};

// Co-membership probabilities of 3 fixed point pairs per (A, lambda)
// configuration, compared between the two generation routes.
std::vector<EquivalenceRow> equivalence_experiment(std::size_t replicates, std::uint64_t seed,
                                                   unsigned threads = 1);

struct BiasRow {
  double lambda = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  bool pass = false;  // value <= bound + 3 stderr
};

// Bias of an axis-aligned Mondrian (uniform weights) against the Erlang
// diameter bound L^2 Gamma(2+2)/Gamma(2) (d/lambda)^2, for the ridge target
// f(x) = x_1 on the unit cube.
std::vector<BiasRow> bias_experiment(std::size_t dim, const Vec& lambda_grid,
                                     std::size_t n_mc, std::size_t n_eval,
                                     std::size_t replicates, std::uint64_t seed,
                                     unsigned threads = 1);

// CSV emission; all numeric cells use round-trip formatting.
//   rates:          n,lambda,M,risk,stderr
//   suboptimality:  lambda,w1..wd,empirical_risk,stderr,lower_bound,pass
//   geometry:       check_id,estimate,stderr,bound_or_target,pass
//   equivalence:    config_id,pair_id,p_direct,p_lifted,stderr_pooled,pass
//   bias:           lambda,bias,stderr,bound,pass
void write_rates_csv(const std::string& path, const RateFit& fit);
void write_suboptimality_csv(const std::string& path,
                             const std::vector<SuboptimalityCell>& cells);
void write_geometry_csv(const std::string& path, const std::vector<GeometryRow>& rows);
void write_equivalence_csv(const std::string& path, const std::vector<EquivalenceRow>& rows);
void write_bias_csv(const std::string& path, const std::vector<BiasRow>& rows);

// Log-log risk curves with the fitted slopes, one series per family.
void write_rates_plot(const std::string& path,
                      const std::vector<std::pair<std::string, RateFit>>& fits);

}  // namespace stitforest
