#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stitforest/linalg.hpp"

namespace stitforest {

double mean(std::span<const double> xs);

// Unbiased sample variance; zero for fewer than two points.
double sample_variance(std::span<const double> xs);

// Standard error of the sample mean.
double stderr_of_mean(std::span<const double> xs);

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample statistic against a CDF.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

// Asymptotic two-sample critical value c(level) * sqrt((n+m)/(n*m)) with
// c(level) = sqrt(-log(level/2) / 2).
double ks_two_sample_critical(double level, std::size_t n, std::size_t m);

double ks_one_sample_critical(double level, std::size_t n);

// CDF of Gamma(shape 2, rate r): 1 - exp(-r x)(1 + r x).
double gamma2_cdf(double x, double rate);

// Erlang tail sum: for T ~ Gamma(a, 1), E[T^k 1{T >= c}] equals
// (Gamma(a+k)/Gamma(a)) * sum_{n=0}^{a+k-1} c^n e^{-c} / n!   (integer a, k).
double erlang_tail_moment(std::size_t a, std::size_t k, double c);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Least squares line y = intercept + slope * x with the usual slope standard
// error from the residual variance.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace stitforest
