#pragma once

#include <string>
#include <vector>

#include "stitforest/dirdist.hpp"
#include "stitforest/mondrian.hpp"
#include "stitforest/rng.hpp"
#include "stitforest/tessellation.hpp"

namespace stitforest {

// d x m matrix of feature directions (columns a_i), d <= m, full row rank at
// tolerance 1e-9.  Caches column norms and |A|_{2,1} = sum_i |a_i|_2.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Mat a);

  std::size_t dim() const { return a_.rows; }
  std::size_t n_features() const { return a_.cols; }
  const Mat& matrix() const { return a_; }
  Vec column(std::size_t j) const;
  double col_norm(std::size_t j) const { return col_norms_[j]; }
  double norm21() const { return norm21_; }

  // CSV layout: one header row f1..fm, then d rows of m values.
  static FeatureMatrix from_csv(const std::string& path);
  void to_csv(const std::string& path) const;

 private:
  Mat a_;
  Vec col_norms_;
  double norm21_ = 0.0;
};

// The directional distribution of the induced oblique process: representatives
// a_i / |a_i| with weights |a_i| / |A|_{2,1}; parallel (or antiparallel)
// columns are merged with their weights added.
DirectionalDistribution dirdist_from_matrix(const FeatureMatrix& a);

// Orthonormal basis of an s-dimensional subspace, as rows.
struct SubspaceSpec {
  Mat basis;

  std::size_t ambient_dim() const { return basis.cols; }
  std::size_t dim() const { return basis.rows; }

  // Orthonormalizes the given rows; throws RankDeficient when dependent.
  static SubspaceSpec from_rows(Mat rows);

  // The first s coordinate axes of R^d.
  static SubspaceSpec coordinate(std::size_t s, std::size_t d);
};

struct LiftedPartition {
  std::vector<int> labels;    // leaf id per input point
  TessellationTree tree;      // the lifted Mondrian tessellation in R^m
  double lifted_lifetime = 0.0;
};

// Transform route: map points through y = A^T x, run a standard Mondrian
// (uniform weights 1/m) with lifetime m * lambda / |A|_{2,1} on the padded
// bounding box of the transformed points, and read off the induced partition.
// Padding is padding_factor times the expected zero-cell side 2|A|_{2,1} /
// lambda in every lifted coordinate, so window truncation effects decay like
// exp(-2 * padding_factor).
LiftedPartition lifted_partition(const Mat& points, const FeatureMatrix& a, double lambda,
                                 Rng& rng, double padding_factor = 3.0);

// Cell of the origin of the induced oblique tessellation at lifetime lambda:
// {y : -T1_i <= <a_i, y> <= T2_i} with T ~ Exp(lambda / |A|_{2,1}), i < m.
HPolytope oblique_zero_cell(const FeatureMatrix& a, double lambda, Rng& rng);

// s-th largest singular value of the projection of A onto S.
double sigma_s(const FeatureMatrix& a, const SubspaceSpec& s);

// sum_i |a_i - P_S a_i|_2: the (2,1)-norm of the off-subspace component.
double perp_norm21(const FeatureMatrix& a, const SubspaceSpec& s);

struct RiskBoundInputs {
  double lipschitz = 1.0;   // L
  double beta = 1.0;        // Hoelder exponent in (0, 1]
  double sup_f = 1.0;       // |f|_infinity
  double noise_sd = 0.0;    // sigma
  std::size_t n = 1;        // sample size
  double lambda = 1.0;      // lifetime
};

struct RiskBound {
  double bias = 0.0;
  double variance = 0.0;
  double total = 0.0;
};

// Closed-form forest risk bound for a (2,1)-normalized feature matrix:
//   bias     9 L^2 m^{4 beta} / (d^{2 beta} lambda^{2 beta} sigma_s^{2 beta})
//   variance (5|f|^2 + 2 sigma^2)/n * (sum_{k>s} c_{d,k} lambda^k eps^{k-s}
//                                      + sum_{k<=s} c_{d,k} lambda^k)
// with c_{d,k} = kappa_k pi^{k/2} d^{k/2} / k! and eps = perp_norm21(A, S).
// Throws NotNormalized unless | |A|_{2,1} - 1 | <= 1e-9.  Values are reported
// as-is, never clamped.
RiskBound c1_bound(const RiskBoundInputs& in, const FeatureMatrix& a, const SubspaceSpec& s);

struct DeterministicDiameterBound {
  double statement = 0.0;  // with the extra 2^-k factor
  double proof = 0.0;      // as established: m^k Gamma(2m+k) / (d^k sigma^k Gamma(2m))
};

// Upper bounds for E[D(P_S Z_0)^k] at unit lifetime.  The two published
// variants differ by 2^k; inequality checks gate on the looser proof form.
DeterministicDiameterBound deter_bound(std::size_t m, std::size_t d, double sigma_s_value,
                                       std::size_t k);

struct LifetimeSchedule {
  double lambda = 0.0;
  std::size_t tree_floor = 1;  // minimum forest size for the rule
};

// Tuned lifetime for sample size n under rule "c1" (Lipschitz regime) or
// "c2" (C2 regime, which also needs M >= lambda^{2 beta} trees).  eps_n is
// the off-subspace mass of the feature matrix; the schedule takes the smaller
// of the aligned and misaligned rates, times the multiplier.
LifetimeSchedule lifetime_schedule(const std::string& rule, std::size_t n, std::size_t s,
                                   std::size_t d, double beta, double lipschitz, double eps_n,
                                   double multiplier = 1.0);

}  // namespace stitforest
