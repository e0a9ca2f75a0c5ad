#include "vlab/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <algorithm>
#include <cmath>

#include "vlab/errors.hpp"

namespace vlab {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = pairwise_sum(x) / static_cast<double>(x.size());
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
  return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

MeanSE mean_se(std::span<const double> x) {
  MeanSE r;
  if (x.empty()) return r;
  r.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() > 1) r.std_error = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
  return r;
}

LinearFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw DomainError("wls: size mismatch");
  if (x.size() < 2) throw InsufficientDataError("wls: need at least 2 points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DomainError("wls: abscissae are all equal");
  LinearFit f;
  f.n = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += w[i] * r * r;
  }
  // Exact data: residuals at rounding level count as a perfect fit.
  if (syy <= 0 || sse <= 1e-24 * std::max(syy, 1e-300)) {
    f.r_squared = 1.0;
  } else {
    f.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  f.slope_se = x.size() > 2 ? std::sqrt(sse / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  return f;
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return wls(x, y, w);
}

double student_t_quantile(double confidence, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  if (!(a > 0 && b > 0)) throw DomainError("logspace: endpoints must be positive");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

}  // namespace vlab
