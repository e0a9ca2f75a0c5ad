#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vlab {

/// Pairwise (cascade) summation with a fixed tree shape, so the result depends only on the data.
double pairwise_sum(std::span<const double> x);

struct MeanSE {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and its standard error (unbiased variance / n). n = 1 gives std_error 0.
MeanSE mean_se(std::span<const double> x);

/// Unbiased sample variance.
double sample_variance(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;  // residual-based standard error of the slope
  std::size_t n = 0;
};

/// Ordinary least squares y ~ a + b x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with weights w_i > 0.
LinearFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> w);

/// Two-sided Student-t quantile for the given confidence level (e.g. 0.95).
double student_t_quantile(double confidence, double dof);

/// n points log-spaced on [a, b], a, b > 0, endpoints exact.
std::vector<double> logspace(double a, double b, std::size_t n);

}  // namespace vlab
