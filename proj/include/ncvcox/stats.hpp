#pragma once

#include <span>

namespace ncvcox {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Standard normal quantile; throws Error(config) outside (0, 1).
double normal_quantile(double p);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

struct SlopeFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double p_value = 1.0;  // two-sided t test of slope = 0
};

SlopeFit ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace ncvcox
