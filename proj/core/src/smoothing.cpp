#include "vlab/smoothing.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/quadrature.hpp"

namespace vlab {

double binomial(int m, int j) {
  if (j < 0 || j > m) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= j; ++i) c = c * static_cast<double>(m - j + i) / static_cast<double>(i);
  return std::round(c);
}

double finite_difference(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                         std::span<const double> h, int m) {
  if (m < 1) throw DomainError("finite_difference: m must be at least 1");
  if (x.size() != h.size()) throw DimensionMismatch("finite_difference: x and h differ in dimension");
  double h2 = 0.0;
  for (double v : h) h2 += v * v;
  if (!(h2 > 0.0)) throw DomainError("finite_difference: |h| must be positive");
  std::vector<double> vals(m + 1), pt(x.size());
  for (int j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) pt[i] = x[i] + j * h[i];
    vals[j] = f(pt);
  }
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < m - r; ++j) vals[j] = vals[j + 1] - vals[j];
  return vals[0];
}

double finite_difference(const std::function<double(double)>& f, double x, double h, int m) {
  const double xs[1] = {x}, hs[1] = {h};
  return finite_difference([&f](std::span<const double> p) { return f(p[0]); }, xs, hs, m);
}

double gaussian_window_density(double variance, std::span<const double> x, int d) {
  if (!(variance > 0.0)) throw DomainError("gaussian_window_density: variance must be positive");
  if (d < 1 || x.size() != static_cast<std::size_t>(d)) throw DimensionMismatch("gaussian_window_density: x must have d entries");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(2.0 * std::numbers::pi * variance, -0.5 * d) * std::exp(-r2 / (2.0 * variance));
}

namespace {

double std_normal_pdf(double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi); }

// Δ_{−r}^m of the standard normal density at y, r = |h|/σ.
class NormalDifference {
 public:
  NormalDifference(double r, int m) : r_(r), m_(m), series_(m * r <= 0.25) {
    if (series_) {
      // Δ_{−r}^m φ(y) = φ(y) Σ_{k≥m} m! S(k,m)/k! r^k He_k(y)
      const int kmax = m + 40;
      std::vector<std::vector<double>> s(kmax + 1, std::vector<double>(m + 1, 0.0));
      s[0][0] = 1.0;
      for (int k = 1; k <= kmax; ++k)
        for (int j = 1; j <= std::min(k, m); ++j) s[k][j] = j * s[k - 1][j] + s[k - 1][j - 1];
      double log_mfact = std::lgamma(m + 1.0);
      for (int k = m; k <= kmax; ++k) {
        const double c = std::exp(log_mfact - std::lgamma(k + 1.0) + k * std::log(r)) * s[k][m];
        coeff_.push_back(c);
      }
    }
  }

  double operator()(double y) const {
    if (series_) {
      double he_prev = 1.0, he = y;  // He_0, He_1
      for (int k = 1; k < m_; ++k) {
        const double next = y * he - k * he_prev;
        he_prev = he;
        he = next;
      }
      double sum = 0.0;
      for (std::size_t idx = 0; idx < coeff_.size(); ++idx) {
        const int k = m_ + static_cast<int>(idx);
        sum += coeff_[idx] * he;
        const double next = y * he - k * he_prev;
        he_prev = he;
        he = next;
      }
      return std_normal_pdf(y) * sum;
    }
    double s = 0.0;
    for (int j = 0; j <= m_; ++j) s += ((m_ - j) % 2 ? -1.0 : 1.0) * binomial(m_, j) * std_normal_pdf(y - j * r_);
    return s;
  }

 private:
  double r_;
  int m_;
  bool series_;
  std::vector<double> coeff_;
};

}  // namespace

double gaussian_difference_l1(double variance, double h_norm, int m) {
  if (!(variance > 0.0)) throw DomainError("gaussian_difference_l1: variance must be positive");
  if (m < 1) throw DomainError("gaussian_difference_l1: m must be at least 1");
  if (!(h_norm > 0.0)) throw DomainError("gaussian_difference_l1: |h| must be positive");
  // In σ units the norm depends only on r = |h|/σ.
  const double r = h_norm / std::sqrt(variance);
  const NormalDifference f(r, m);
  const double lo = -8.0 - m * r, hi = 8.0 + m * r;
  constexpr int kScan = 4000;
  std::vector<double> breaks{lo};
  double x_prev = lo, f_prev = f(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    const double fx = f(x);
    if ((f_prev < 0.0 && fx > 0.0) || (f_prev > 0.0 && fx < 0.0)) {
      boost::uintmax_t iters = 100;
      auto root = boost::math::tools::toms748_solve([&f](double y) { return f(y); }, x_prev, x, f_prev, fx,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
      breaks.push_back(0.5 * (root.first + root.second));
    }
    x_prev = x;
    f_prev = fx;
  }
  breaks.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += std::abs(integrate_smooth([&f](double y) { return f(y); }, breaks[i], breaks[i + 1], 1e-10, 1e-8).value);
  return total;
}

double smoothing_bound_ratio(double variance, std::span<const double> h, int m, double A, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("smoothing_bound_ratio: ε must lie in (0,1]");
  double h2 = 0.0;
  for (double v : h) h2 += v * v;
  const double hn = std::sqrt(h2);
  return gaussian_difference_l1(variance, hn, m) / std::pow(hn / std::pow(eps, A), m);
}

std::string to_string(TestFunctionKind k) {
  switch (k) {
    case TestFunctionKind::Cosine: return "Cosine";
    case TestFunctionKind::HolderBump: return "HolderBump";
    case TestFunctionKind::Constant: return "Constant";
  }
  return "unknown";
}

TestFunctionKind test_function_kind_from_string(const std::string& name) {
  for (auto k : {TestFunctionKind::Cosine, TestFunctionKind::HolderBump, TestFunctionKind::Constant})
    if (to_string(k) == name) return k;
  throw DomainError("unknown test function kind '" + name + "'");
}

namespace {
void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("test function: α must lie in (0,1]");
}
}  // namespace

TestFunctionSpec TestFunctionSpec::cosine(std::size_t dim, double alpha, double amplitude, double frequency,
                                          double phase) {
  check_alpha(alpha);
  if (dim < 1) throw DomainError("test function: dim must be at least 1");
  if (!(amplitude > 0.0) || !(frequency > 0.0)) throw DomainError("test function: amplitude and frequency must be positive");
  TestFunctionSpec f;
  f.kind_ = TestFunctionKind::Cosine;
  f.dim_ = dim;
  f.alpha_ = alpha;
  f.amplitude_ = amplitude;
  f.frequency_ = frequency;
  f.phase_ = phase;
  f.sup_norm_ = amplitude;
  // |cos a − cos b| ≤ 2^{1−α}|a − b|^α and |ω Σ(x_i − y_i)| ≤ ω√d |x − y|
  f.seminorm_ = amplitude * std::pow(2.0, 1.0 - alpha) * std::pow(frequency * std::sqrt(double(dim)), alpha);
  f.center_.assign(dim, 0.0);
  f.spot_check();
  return f;
}

TestFunctionSpec TestFunctionSpec::holder_bump(std::size_t dim, double alpha, double amplitude, double radius,
                                               std::vector<double> center) {
  check_alpha(alpha);
  if (dim < 1) throw DomainError("test function: dim must be at least 1");
  if (!(amplitude > 0.0) || !(radius > 0.0)) throw DomainError("test function: amplitude and radius must be positive");
  if (center.empty()) center.assign(dim, 0.0);
  if (center.size() != dim) throw DimensionMismatch("test function: center has wrong dimension");
  TestFunctionSpec f;
  f.kind_ = TestFunctionKind::HolderBump;
  f.dim_ = dim;
  f.alpha_ = alpha;
  f.amplitude_ = amplitude;
  f.radius_ = radius;
  f.center_ = std::move(center);
  f.sup_norm_ = amplitude;
  f.seminorm_ = amplitude / std::pow(radius, alpha);
  f.spot_check();
  return f;
}

TestFunctionSpec TestFunctionSpec::constant(std::size_t dim, double value, double alpha) {
  check_alpha(alpha);
  if (dim < 1) throw DomainError("test function: dim must be at least 1");
  TestFunctionSpec f;
  f.kind_ = TestFunctionKind::Constant;
  f.dim_ = dim;
  f.alpha_ = alpha;
  f.amplitude_ = value;
  f.sup_norm_ = std::abs(value);
  f.center_.assign(dim, 0.0);
  return f;
}

double TestFunctionSpec::operator()(std::span<const double> x) const {
  switch (kind_) {
    case TestFunctionKind::Constant: return amplitude_;
    case TestFunctionKind::Cosine: {
      double s = 0.0;
      for (double v : x) s += v;
      return amplitude_ * std::cos(frequency_ * s + phase_);
    }
    case TestFunctionKind::HolderBump: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
      const double u = std::sqrt(r2) / radius_;
      return u >= 1.0 ? 0.0 : amplitude_ * (1.0 - std::pow(u, alpha_));
    }
  }
  return 0.0;
}

void TestFunctionSpec::spot_check() const {
  std::mt19937_64 gen(0x7e57);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(dim_), y(dim_);
  for (int trial = 0; trial < 256; ++trial) {
    const double scale = std::pow(10.0, -5.0 + 5.5 * unit(gen));
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      x[i] = center_[i] + 2.0 * radius_ * normal(gen);
      y[i] = x[i] + scale * normal(gen);
      d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    const double fx = (*this)(x), fy = (*this)(y);
    if (std::abs(fx) > sup_norm_ * (1.0 + 1e-12)) throw ValidationError("test_function", "spot check: sup norm exceeded");
    if (d2 > 0.0 && std::abs(fx - fy) > seminorm_ * std::pow(std::sqrt(d2), alpha_) * (1.0 + 1e-9) + 1e-14)
      throw ValidationError("test_function", "spot check: Hölder seminorm exceeded");
  }
}

namespace {

std::size_t resolve_paths(const SolutionEnsemble& sol, std::size_t n_paths) {
  if (n_paths == 0) return sol.n_paths();
  if (n_paths > sol.n_paths()) throw DomainError("estimator: n_paths exceeds the ensemble size");
  return n_paths;
}

void check_h(const SolutionEnsemble& sol, const TestFunctionSpec& phi, std::span<const double> h) {
  if (h.size() != sol.dim() || phi.dim() != sol.dim())
    throw DimensionMismatch("estimator: h and φ must match the solution dimension");
}

// Δ_h^m φ at each of the given points, [path][component] layout.
std::vector<double> differences(const std::vector<double>& points, std::size_t n, std::size_t d,
                                const TestFunctionSpec& phi, std::span<const double> h, int m) {
  std::vector<double> out(n);
  const auto f = [&phi](std::span<const double> p) { return phi(p); };
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      out[p] = finite_difference(f, std::span<const double>(&points[p * d], d), h, m);
  });
  return out;
}

}  // namespace

MeanSE estimate_pe(const SolutionEnsemble& sol, double t, double eps, const TestFunctionSpec& phi,
                   std::span<const double> h, int m, std::size_t n_paths) {
  check_h(sol, phi, h);
  const std::size_t n = resolve_paths(sol, n_paths);
  const std::vector<double> y = auxiliary_process(sol, t, eps);
  return mean_se(differences(y, n, sol.dim(), phi, h, m));
}

MeanSE estimate_difference_mean(const SolutionEnsemble& sol, double t, const TestFunctionSpec& phi,
                                std::span<const double> h, int m, std::size_t n_paths) {
  check_h(sol, phi, h);
  const std::size_t n = resolve_paths(sol, n_paths);
  const std::vector<double> x = sol.values_at(sol.grid().node_index(t));
  return mean_se(differences(x, n, sol.dim(), phi, h, m));
}

MeanSE estimate_ae(const SolutionEnsemble& sol, double t, double eps, const TestFunctionSpec& phi,
                   std::span<const double> h, int m, std::size_t n_paths) {
  check_h(sol, phi, h);
  const std::size_t n = resolve_paths(sol, n_paths);
  const std::vector<double> x = sol.values_at(sol.grid().node_index(t));
  const std::vector<double> y = auxiliary_process(sol, t, eps);
  std::vector<double> dx = differences(x, n, sol.dim(), phi, h, m);
  const std::vector<double> dy = differences(y, n, sol.dim(), phi, h, m);
  for (std::size_t p = 0; p < n; ++p) dx[p] -= dy[p];
  return mean_se(dx);
}

MeanSE estimate_ae_independent(const SolutionEnsemble& for_x, const SolutionEnsemble& for_y, double t, double eps,
                               const TestFunctionSpec& phi, std::span<const double> h, int m) {
  const MeanSE ex = estimate_difference_mean(for_x, t, phi, h, m);
  const MeanSE ey = estimate_pe(for_y, t, eps, phi, h, m);
  return {ex.mean - ey.mean, std::sqrt(ex.std_error * ex.std_error + ey.std_error * ey.std_error)};
}

ScalingFit scaling_regression(const std::vector<ScalingPoint>& points) {
  ScalingFit fit;
  std::vector<double> lx, ly, w;
  bool any_error = false;
  for (const auto& p : points) any_error = any_error || p.std_error > 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.abscissa > 0.0)) throw DomainError("scaling_regression: abscissae must be positive");
    const double v = std::abs(p.value);
    if (!(v > 0.0) || v < 3.0 * p.std_error || !std::isfinite(v)) {
      fit.excluded.push_back(i);
      continue;
    }
    fit.used.push_back(i);
    lx.push_back(std::log(p.abscissa));
    ly.push_back(std::log(v));
    // Var(log|v|) ≈ (se/v)²; error-free points among noisy ones get a large finite weight.
    const double rel = std::max(p.std_error / v, 1e-8);
    w.push_back(any_error ? 1.0 / (rel * rel) : 1.0);
  }
  if (fit.used.size() < 4)
    throw InsufficientDataError("scaling_regression: fewer than 4 points distinguishable from zero");
  const LinearFit lf = wls(lx, ly, w);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  double half_width;
  if (any_error) {
    double sw = 0, sx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sw += w[i];
      sx += w[i] * lx[i];
    }
    double sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxx += w[i] * (lx[i] - sx / sw) * (lx[i] - sx / sw);
    fit.slope_se = 1.0 / std::sqrt(sxx);
    half_width = 1.959963984540054 * fit.slope_se;
  } else {
    fit.slope_se = lf.slope_se;
    half_width = student_t_quantile(0.95, static_cast<double>(lx.size() - 2)) * fit.slope_se;
  }
  fit.ci_low = fit.slope - half_width;
  fit.ci_high = fit.slope + half_width;
  return fit;
}

TheoremExponents theorem_exponents(double A, double beta, double H, std::optional<double> delta, int m,
                                   double alpha) {
  for (double v : {A, beta, H})
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("theorem_exponents: A, β, H must lie in (0,1]");
  if (delta && !(*delta > 0.0)) throw DomainError("theorem_exponents: δ must be positive");
  if (m < 1) throw DomainError("theorem_exponents: m must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("theorem_exponents: α must lie in (0,1]");
  TheoremExponents e;
  const double bh = beta * H;
  e.eta_t1 = (1.0 - A + bh) / A;
  e.m = m;
  e.alpha = alpha;
  e.s = m * alpha * (1.0 + bh) / (alpha * (1.0 + bh) + A * m);
  e.eps_rule_exponent = m / (alpha * (bh + 1.0) + A * m);
  e.ae_exponent = (bh + 1.0) * alpha;
  if (delta) {
    const double mu = std::min(bh, *delta);
    e.mu = mu;
    e.eta_t2 = (mu + 1.0 - A) / A;
    e.s_t2 = m * alpha * (1.0 + mu) / (alpha * (1.0 + mu) + A * m);
    e.eps_rule_exponent_t2 = m / (alpha * (mu + 1.0) + A * m);
    e.ae_exponent_t2 = (mu + 1.0) * alpha;
  }
  return e;
}

}  // namespace vlab
