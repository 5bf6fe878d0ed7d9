#include "ncvcox/stats.hpp"

#include "ncvcox/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numeric>

namespace ncvcox {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) config_error("normal quantile probability must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

SlopeFit ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) config_error("ols_slope needs matching inputs of length >= 3");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) config_error("ols_slope: regressor is constant");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  fit.slope_se = std::sqrt(rss / dof / sxx);
  if (fit.slope_se > 0.0) {
    const double t = std::abs(fit.slope / fit.slope_se);
    fit.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t_distribution<double>(dof), t));
  } else {
    fit.p_value = fit.slope != 0.0 ? 0.0 : 1.0;
  }
  return fit;
}

}  // namespace ncvcox
