#include "stitforest/targets.hpp"

#include <cmath>

#include "stitforest/errors.hpp"

namespace stitforest {

RidgeTarget::RidgeTarget(Mat a_true, std::string link, double noise_sd)
    : a_(std::move(a_true)), link_(std::move(link)), noise_sd_(noise_sd) {
  if (a_.rows == 0 || a_.cols == 0) throw InvalidTarget("ridge matrix is empty");
  if (a_.rows > a_.cols) throw InvalidTarget("ridge dimension exceeds the ambient dimension");
  if (noise_sd_ < 0.0) throw InvalidTarget("noise level must be nonnegative");
  Vec sv = singular_values(a_);
  if (sv.size() < a_.rows || !(sv[a_.rows - 1] > 1e-9 * std::max(1.0, sv[0])))
    throw InvalidTarget("ridge matrix rows are linearly dependent");
  sigma1_ = sv[0];

  const double rs = std::sqrt(static_cast<double>(a_.rows));
  if (link_ == "linear" || link_ == "abs-sum" || link_ == "sine")
    lipschitz_ = rs * sigma1_;
  else if (link_ == "quadratic")
    lipschitz_ = 2.0 * std::sqrt(static_cast<double>(a_.cols)) * sigma1_ * sigma1_;
  else
    throw InvalidTarget("unknown link: " + link_);
}

double RidgeTarget::value(std::span<const double> x) const {
  if (x.size() != a_.cols) throw DimensionMismatch("query dimension mismatch");
  double out = 0.0;
  for (std::size_t r = 0; r < a_.rows; ++r) {
    double z = 0.0;
    for (std::size_t c = 0; c < a_.cols; ++c) z += a_.at(r, c) * x[c];
    if (link_ == "linear")
      out += z;
    else if (link_ == "abs-sum")
      out += std::abs(z);
    else if (link_ == "sine")
      out += std::sin(z);
    else
      out += z * z;
  }
  return out;
}

SubspaceSpec RidgeTarget::subspace() const { return SubspaceSpec::from_rows(a_); }

Vec sample_mu_point(const std::string& mu, std::size_t d, Rng& rng) {
  if (d == 0) throw DimensionMismatch("covariates need at least one dimension");
  Vec x(d);
  if (mu == "uniform-cube") {
    for (double& v : x) v = rng.uniform();
    return x;
  }
  if (mu == "uniform-ball") {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (double& v : x) {
        v = rng.normal();
        sq += v * v;
      }
    } while (!(sq > 0.0));
    const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(sq);
    for (double& v : x) v *= r;
    return x;
  }
  throw ConfigError("unknown covariate law: " + mu);
}

AxisBox mu_window(const std::string& mu, std::size_t d) {
  if (mu == "uniform-cube") return AxisBox{Vec(d, 0.0), Vec(d, 1.0)};
  if (mu == "uniform-ball") return AxisBox{Vec(d, -1.0), Vec(d, 1.0)};
  throw ConfigError("unknown covariate law: " + mu);
}

Dataset sample_dataset(const RidgeTarget& target, const std::string& mu, std::size_t n,
                       Rng& rng) {
  if (n == 0) throw DimensionMismatch("datasets need at least one row");
  const std::size_t d = target.dim();
  Dataset data{Mat(n, d), Vec(n)};
  for (std::size_t r = 0; r < n; ++r) {
    Vec x = sample_mu_point(mu, d, rng);
    for (std::size_t c = 0; c < d; ++c) data.x.at(r, c) = x[c];
    double y = target.value(x);
    if (target.noise_sd() > 0.0) y += target.noise_sd() * rng.normal();
    data.y[r] = y;
  }
  return data;
}

}  // namespace stitforest
