#include "vlab/kernels.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <ostream>

#include "vlab/errors.hpp"
#include "vlab/quadrature.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

constexpr double kQuadTol = 1e-12;

// ((1+y)^a − 1)/y, smooth at y = 0.
double g_ratio(double a, double y) {
  if (y < 1e-12) return a * (1.0 + 0.5 * (a - 1.0) * y);
  return std::expm1(a * std::log1p(y)) / y;
}

// (1 − x^c)/c for x in (0,1], stable as c → 0.
double one_minus_pow_over(double x, double c) {
  const double lx = std::log(x);
  if (std::abs(c * lx) < 1e-300) return -lx;
  return -std::expm1(c * lx) / c;
}

// I(Z) = ∫_0^Z θ^{H−3/2}(1 − (1+θ)^{H−1/2}) dθ, the integral inside F_1.
double molchan_integral(double hurst, double z) {
  const double a = hurst - 0.5;
  const double p = hurst + 0.5;
  const double zc = std::min(z, 1.0);
  // θ ≤ 1: integrand = −θ^{H−1/2} g(θ); substitute w = θ^{H+1/2}.
  double total;
  if (zc < 1e-6) {
    // g(θ) = a + a(a−1)θ/2 + O(θ²)
    total = -(a * std::pow(zc, p) + 0.5 * a * (a - 1.0) * std::pow(zc, p + 1.0) * p / (p + 1.0)) / p;
  } else {
    total = -integrate_tanh_sinh([&](double w) { return g_ratio(a, std::pow(w, 1.0 / p)); }, 0.0,
                                 std::pow(zc, p), kQuadTol)
                 .value /
            p;
  }
  if (z > 1.0) {
    // θ = 1/x on [1, Z]; the integrand splits into two powers and a smooth remainder.
    const double ell = 1.0 / z;
    const double q = 2.0 - 2.0 * hurst;
    const double rem =
        integrate_tanh_sinh([&](double w) { return g_ratio(a, std::pow(w, 1.0 / q)); }, std::pow(ell, q), 1.0,
                            kQuadTol)
            .value /
        q;
    total += one_minus_pow_over(ell, 0.5 - hurst) - one_minus_pow_over(ell, 1.0 - 2.0 * hurst) - rem;
  }
  return total;
}

// ∫_s^t (u−s)^{H−3/2} u^{H−1/2} du via u = s + v^{1/(H−1/2)}.
double simple_integral(double hurst, double s, double lag) {
  const double a = hurst - 0.5;
  return integrate_tanh_sinh([&](double v) { return std::pow(s + std::pow(v, 1.0 / a), a); }, 0.0,
                             std::pow(lag, a), kQuadTol)
             .value /
         a;
}

double raw_general_kernel(double hurst, double s, double lag) {
  const double a = hurst - 0.5;
  if (a == 0.0) return 1.0;
  return std::pow(lag, a) - a * std::pow(s, a) * molchan_integral(hurst, lag / s);
}

void check_time(const KernelSpec& spec, double t, const char* what) {
  if (!(t >= 0.0) || t > spec.horizon() * (1.0 + 1e-12))
    throw DomainError(std::string(what) + ": time outside [0, T]");
}

// (1+x)^a − x^a, computed without cancellation for large x.
double rl_difference(double a, double x) {
  if (x == 0.0) return 1.0;
  return std::pow(x, a) * std::expm1(a * std::log1p(1.0 / x));
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Brownian: return "Brownian";
    case KernelFamily::FbmGeneral: return "FbmGeneral";
    case KernelFamily::FbmSimple: return "FbmSimple";
    case KernelFamily::RiemannLiouville: return "RiemannLiouville";
    case KernelFamily::OrnsteinUhlenbeck: return "OrnsteinUhlenbeck";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  for (auto f : {KernelFamily::Brownian, KernelFamily::FbmGeneral, KernelFamily::FbmSimple,
                 KernelFamily::RiemannLiouville, KernelFamily::OrnsteinUhlenbeck})
    if (to_string(f) == name) return f;
  throw DomainError("unknown kernel family '" + name + "'");
}

KernelSpec::KernelSpec(KernelFamily family, double hurst, double decay, double horizon)
    : family_(family), hurst_(hurst), decay_(decay), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("kernel: horizon T must be positive");
  if (family == KernelFamily::Brownian || family == KernelFamily::OrnsteinUhlenbeck) {
    hurst_ = 0.5;
  } else if (!(hurst > 0.0 && hurst < 1.0)) {
    throw DomainError("kernel: hurst must lie in (0,1)");
  }
  if (family == KernelFamily::OrnsteinUhlenbeck && !(decay > 0.0 && std::isfinite(decay)))
    throw DomainError("kernel: decay must be positive");
  if (family == KernelFamily::FbmSimple) {
    if (!(hurst > 0.5)) throw DomainError("kernel: FbmSimple requires hurst > 1/2");
    norm_ = std::sqrt(hurst * (2.0 * hurst - 1.0) / boost::math::beta(2.0 - 2.0 * hurst, hurst - 0.5));
  } else if (family == KernelFamily::FbmGeneral) {
    // Fix d_H by R(1,1) = 1; self-similarity of the kernel gives R(t,t) = t^{2H} for all t.
    const double h = hurst;
    const double r11 = integrate_endpoints(
                           [h](double, double da, double db) {
                             const double k = raw_general_kernel(h, da, db);
                             return k * k;
                           },
                           0.0, 1.0, kQuadTol)
                           .value;
    norm_ = 1.0 / std::sqrt(r11);
  }
  // Square-integrability probe.
  for (double t : {0.5 * horizon_, horizon_}) {
    const double v = kernel_square_integral(*this, t, 0.0, t);
    if (!std::isfinite(v) || !(v > 0.0)) throw NumericError("kernel: ∫K² is not finite on the probe grid", v);
  }
}

KernelSpec KernelSpec::brownian(double horizon) { return KernelSpec(KernelFamily::Brownian, 0.5, 1.0, horizon); }
KernelSpec KernelSpec::fbm_general(double hurst, double horizon) {
  return KernelSpec(KernelFamily::FbmGeneral, hurst, 1.0, horizon);
}
KernelSpec KernelSpec::fbm_simple(double hurst, double horizon) {
  return KernelSpec(KernelFamily::FbmSimple, hurst, 1.0, horizon);
}
KernelSpec KernelSpec::riemann_liouville(double hurst, double horizon) {
  return KernelSpec(KernelFamily::RiemannLiouville, hurst, 1.0, horizon);
}
KernelSpec KernelSpec::ornstein_uhlenbeck(double decay, double horizon) {
  return KernelSpec(KernelFamily::OrnsteinUhlenbeck, 0.5, decay, horizon);
}

double KernelSpec::regularity_index() const { return hurst_; }

bool KernelSpec::has_closed_form_covariance() const { return family_ != KernelFamily::RiemannLiouville; }

bool KernelSpec::singular_diagonal() const {
  return (family_ == KernelFamily::RiemannLiouville || family_ == KernelFamily::FbmGeneral) && hurst_ < 0.5;
}

double KernelSpec::lower_bound_constant() const {
  if (family_ != KernelFamily::FbmSimple) throw DomainError("lower_bound_constant: FbmSimple only");
  return norm_ / (hurst_ - 0.5);
}

double KernelSpec::eval_lag(double t, double s, double lag) const {
  (void)t;
  switch (family_) {
    case KernelFamily::Brownian: return 1.0;
    case KernelFamily::RiemannLiouville: return std::pow(lag, hurst_ - 0.5);
    case KernelFamily::OrnsteinUhlenbeck: return std::exp(-decay_ * lag);
    case KernelFamily::FbmSimple: return norm_ * std::pow(s, 0.5 - hurst_) * simple_integral(hurst_, s, lag);
    case KernelFamily::FbmGeneral: return norm_ * raw_general_kernel(hurst_, s, lag);
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& spec, double t, double s) {
  check_time(spec, t, "eval_kernel");
  if (!(s > 0.0 && s < t)) throw DomainError("eval_kernel: requires 0 < s < t");
  return spec.eval_lag(t, s, t - s);
}

double kernel_square_integral(const KernelSpec& spec, double t, double a, double b) {
  check_time(spec, t, "kernel_square_integral");
  if (!(a >= 0.0 && a < b && b <= t)) throw DomainError("kernel_square_integral: requires 0 ≤ a < b ≤ t");
  const double gap = t - b;
  return integrate_endpoints(
             [&](double, double da, double db) {
               const double k = spec.eval_lag(t, a + da, gap + db);
               return k * k;
             },
             a, b, kQuadTol)
      .value;
}

double covariance_by_quadrature(const KernelSpec& spec, double t, double s) {
  check_time(spec, t, "covariance");
  check_time(spec, s, "covariance");
  const double lo = std::min(t, s), hi = std::max(t, s);
  if (lo == 0.0) return 0.0;
  if (lo == hi) return kernel_square_integral(spec, hi, 0.0, hi);
  const double gap = hi - lo;
  return integrate_endpoints(
             [&](double, double da, double db) {
               return spec.eval_lag(hi, da, gap + db) * spec.eval_lag(lo, da, db);
             },
             0.0, lo, kQuadTol)
      .value;
}

double covariance(const KernelSpec& spec, double t, double s) {
  check_time(spec, t, "covariance");
  check_time(spec, s, "covariance");
  const double lo = std::min(t, s), hi = std::max(t, s);
  switch (spec.family()) {
    case KernelFamily::Brownian: return lo;
    case KernelFamily::FbmGeneral:
    case KernelFamily::FbmSimple: {
      const double h2 = 2.0 * spec.hurst();
      return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(hi - lo, h2));
    }
    case KernelFamily::OrnsteinUhlenbeck: {
      const double l = spec.decay();
      return std::exp(-l * (hi - lo)) * -std::expm1(-2.0 * l * lo) / (2.0 * l);
    }
    case KernelFamily::RiemannLiouville:
      if (lo == hi) return std::pow(hi, 2.0 * spec.hurst()) / (2.0 * spec.hurst());
      return covariance_by_quadrature(spec, t, s);
  }
  return 0.0;
}

double tail_variance_by_quadrature(const KernelSpec& spec, double t, double eps) {
  check_time(spec, t, "tail_variance");
  if (!(eps > 0.0 && eps < t)) throw DomainError("tail_variance: requires 0 < ε < t");
  return kernel_square_integral(spec, t, t - eps, t);
}

double tail_variance(const KernelSpec& spec, double t, double eps) {
  check_time(spec, t, "tail_variance");
  if (!(eps > 0.0 && eps < t)) throw DomainError("tail_variance: requires 0 < ε < t");
  switch (spec.family()) {
    case KernelFamily::Brownian: return eps;
    case KernelFamily::RiemannLiouville: return std::pow(eps, 2.0 * spec.hurst()) / (2.0 * spec.hurst());
    case KernelFamily::OrnsteinUhlenbeck: return -std::expm1(-2.0 * spec.decay() * eps) / (2.0 * spec.decay());
    default: return tail_variance_by_quadrature(spec, t, eps);
  }
}

double increment_variance(const KernelSpec& spec, double t, double s) {
  check_time(spec, t, "increment_variance");
  if (!(s >= 0.0 && s <= t)) throw DomainError("increment_variance: requires 0 ≤ s ≤ t");
  const double gap = t - s;
  if (gap == 0.0) return 0.0;
  const double h2 = 2.0 * spec.hurst();
  switch (spec.family()) {
    case KernelFamily::Brownian: return gap;
    case KernelFamily::FbmGeneral:
    case KernelFamily::FbmSimple: return std::pow(gap, h2);
    case KernelFamily::OrnsteinUhlenbeck: {
      const double l = spec.decay();
      const double shrink = std::expm1(-l * gap);
      return shrink * shrink * -std::expm1(-2.0 * l * s) / (2.0 * l) - std::expm1(-2.0 * l * gap) / (2.0 * l);
    }
    case KernelFamily::RiemannLiouville: {
      // gap^{2H} [∫_0^{s/gap} ((1+x)^a − x^a)² dx + 1/(2H)]
      const double a = spec.hurst() - 0.5;
      const double x_max = s / gap;
      double integral = 0.0;
      if (x_max > 0.0) {
        auto sq = [a](double x) {
          const double d = rl_difference(a, x);
          return d * d;
        };
        integral = integrate_tanh_sinh(sq, 0.0, std::min(x_max, 1.0), kQuadTol).value;
        if (x_max > 1.0)
          integral += integrate_tanh_sinh([&](double y) { return sq(std::exp(y)) * std::exp(y); }, 0.0,
                                          std::log(x_max), kQuadTol)
                          .value;
      }
      return std::pow(gap, h2) * (integral + 1.0 / h2);
    }
  }
  return 0.0;
}

namespace {

ConditionFit fit_log_log(std::vector<std::pair<double, double>> grid) {
  ConditionFit fit;
  std::vector<double> lx, ly;
  for (const auto& [x, v] : grid) {
    if (!(v > 0.0)) throw NumericError("condition fit: non-positive value on the grid", v);
    lx.push_back(std::log(x));
    ly.push_back(std::log(v));
  }
  const LinearFit lf = ols(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = std::exp(lf.intercept);
  fit.r_squared = lf.r_squared;
  fit.slope_se = lf.slope_se;
  fit.exponent_estimate = lf.slope / 2.0;
  fit.grid = std::move(grid);
  return fit;
}

void check_span(const std::vector<double>& xs, const char* what) {
  if (xs.size() < 4) throw DomainError(std::string(what) + ": need at least 4 grid points");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError(std::string(what) + ": grid must be strictly increasing");
  if (!(xs.back() >= 100.0 * xs.front() * (1.0 - 1e-12)))
    throw DomainError(std::string(what) + ": grid must span at least two decades");
}

}  // namespace

ConditionFit fit_condition_cc1(const KernelSpec& spec, double t, const std::vector<double>& eps_grid) {
  check_span(eps_grid, "cc1 fit");
  if (!(eps_grid.front() > 0.0 && eps_grid.back() < t)) throw DomainError("cc1 fit: ε grid must lie in (0,t)");
  std::vector<std::pair<double, double>> grid;
  for (double e : eps_grid) grid.emplace_back(e, tail_variance(spec, t, e));
  return fit_log_log(std::move(grid));
}

ConditionFit fit_condition_cc2(const KernelSpec& spec, const std::vector<std::pair<double, double>>& pairs) {
  std::vector<std::pair<double, double>> gap_pairs;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0 && t > s && t <= spec.horizon() * (1.0 + 1e-12)))
      throw DomainError("cc2 fit: pairs must satisfy 0 ≤ s < t ≤ T");
    gap_pairs.emplace_back(t - s, increment_variance(spec, t, s));
  }
  std::sort(gap_pairs.begin(), gap_pairs.end());
  std::vector<double> gaps;
  for (const auto& gp : gap_pairs) gaps.push_back(gp.first);
  check_span(gaps, "cc2 fit");
  return fit_log_log(std::move(gap_pairs));
}

ConditionFit fit_increment_exponent(const std::vector<double>& gaps, const std::vector<double>& variances) {
  if (gaps.size() != variances.size()) throw DomainError("increment fit: size mismatch");
  std::vector<std::pair<double, double>> grid;
  for (std::size_t i = 0; i < gaps.size(); ++i) grid.emplace_back(gaps[i], variances[i]);
  std::sort(grid.begin(), grid.end());
  std::vector<double> xs;
  for (const auto& g : grid) xs.push_back(g.first);
  check_span(xs, "increment fit");
  return fit_log_log(std::move(grid));
}

std::vector<double> default_cc1_grid(const KernelSpec& spec, double t) {
  const double upper = spec.family() == KernelFamily::OrnsteinUhlenbeck ? 1e-3 : 1e-2;
  return logspace(1e-5 * t, upper * t, 12);
}

std::vector<std::pair<double, double>> default_cc2_pairs(const KernelSpec& spec, double t) {
  std::vector<std::pair<double, double>> out;
  for (double g : logspace(1e-4 * spec.horizon(), 1e-2 * spec.horizon(), 12)) out.emplace_back(t - g, t);
  return out;
}

void write_kernel_table_csv(std::ostream& out, const KernelSpec& spec, const std::vector<double>& ts,
                            const std::vector<double>& ss) {
  out << "t,s,K,R\n";
  out.precision(17);
  for (double t : ts)
    for (double s : ss)
      if (s > 0.0 && s < t) out << t << ',' << s << ',' << eval_kernel(spec, t, s) << ',' << covariance(spec, t, s) << '\n';
}

}  // namespace vlab
