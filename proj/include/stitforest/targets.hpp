#pragma once

#include <span>
#include <string>

#include "stitforest/forest.hpp"
#include "stitforest/linalg.hpp"
#include "stitforest/oblique.hpp"
#include "stitforest/rng.hpp"

namespace stitforest {

// Ridge function f(x) = g(A x) with A an s by d matrix whose rows span the
// relevant subspace.  Registered links g on R^s, with the Lipschitz constant
// of f over the unit-scale supports used here (cube [0,1]^d or unit ball):
//   linear     g(z) = sum z_i        L = sqrt(s) * sigma1(A)
//   abs-sum    g(z) = sum |z_i|      L = sqrt(s) * sigma1(A)
//   sine       g(z) = sum sin(z_i)   L = sqrt(s) * sigma1(A)
//   quadratic  g(z) = sum z_i^2      L = 2 * sqrt(d) * sigma1(A)^2
// All links are Lipschitz, so the smoothness exponent is 1.
class RidgeTarget {
 public:
  RidgeTarget(Mat a_true, std::string link, double noise_sd);

  std::size_t dim() const { return a_.cols; }
  std::size_t ridge_dim() const { return a_.rows; }
  const Mat& a_true() const { return a_; }
  const std::string& link() const { return link_; }
  double noise_sd() const { return noise_sd_; }
  double lipschitz() const { return lipschitz_; }
  double beta() const { return 1.0; }

  // Noise-free f(x).
  double value(std::span<const double> x) const;

  // Orthonormalized row span of A.
  SubspaceSpec subspace() const;

 private:
  Mat a_;
  std::string link_;
  double noise_sd_ = 0.0;
  double sigma1_ = 0.0;
  double lipschitz_ = 0.0;
};

// One draw from the covariate law: "uniform-cube" is Uniform([0,1]^d),
// "uniform-ball" is uniform on the unit ball (normal direction times U^{1/d}).
Vec sample_mu_point(const std::string& mu, std::size_t d, Rng& rng);

// The covariate window containing supp(mu).
AxisBox mu_window(const std::string& mu, std::size_t d);

// n rows X ~ mu with Y = f(X) + noise_sd * N(0,1).
Dataset sample_dataset(const RidgeTarget& target, const std::string& mu, std::size_t n,
                       Rng& rng);

}  // namespace stitforest
