#include "stitforest/stats.hpp"

#include <algorithm>
#include <cmath>

#include "stitforest/errors.hpp"

namespace stitforest {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DimensionMismatch("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double stderr_of_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DimensionMismatch("KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw DimensionMismatch("KS needs a nonempty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_two_sample_critical(double level, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

double ks_one_sample_critical(double level, std::size_t n) {
  const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
  return c / std::sqrt(static_cast<double>(n));
}

double gamma2_cdf(double x, double rate) {
  if (x <= 0.0) return 0.0;
  const double rx = rate * x;
  return 1.0 - std::exp(-rx) * (1.0 + rx);
}

double erlang_tail_moment(std::size_t a, std::size_t k, double c) {
  if (a == 0) throw IndexOutOfRange("Erlang shape must be positive");
  if (c < 0.0) c = 0.0;
  // Gamma(a+k)/Gamma(a) as an exact integer product of k terms.
  double ratio = 1.0;
  for (std::size_t i = 0; i < k; ++i) ratio *= static_cast<double>(a + i);
  // Poisson(c) CDF up to a+k-1 terms, computed by the stable recurrence.
  double term = std::exp(-c);
  double sum = term;
  for (std::size_t n = 1; n <= a + k - 1; ++n) {
    term *= c / static_cast<double>(n);
    sum += term;
  }
  return ratio * sum;
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw DimensionMismatch("OLS fit needs at least three matched points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DimensionMismatch("OLS fit needs spread in x");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

}  // namespace stitforest
