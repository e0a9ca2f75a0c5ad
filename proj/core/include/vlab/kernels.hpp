#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace vlab {

enum class KernelFamily { Brownian, FbmGeneral, FbmSimple, RiemannLiouville, OrnsteinUhlenbeck };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& name);

/// A Volterra kernel K(t,s) on [0,T] with its parameters. Construction validates the
/// parameters, calibrates the normalization of the fBm families and probes square-integrability.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double hurst, double decay = 1.0, double horizon = 1.0);

  static KernelSpec brownian(double horizon = 1.0);
  static KernelSpec fbm_general(double hurst, double horizon = 1.0);
  static KernelSpec fbm_simple(double hurst, double horizon = 1.0);
  static KernelSpec riemann_liouville(double hurst, double horizon = 1.0);
  static KernelSpec ornstein_uhlenbeck(double decay = 1.0, double horizon = 1.0);

  KernelFamily family() const { return family_; }
  double hurst() const { return hurst_; }
  double decay() const { return decay_; }
  double horizon() const { return horizon_; }
  bool is_fbm() const { return family_ == KernelFamily::FbmGeneral || family_ == KernelFamily::FbmSimple; }

  /// Increment-regularity index of the noise: H for fBm and RL, 1/2 for Brownian and OU.
  double regularity_index() const;
  bool has_closed_form_covariance() const;
  /// True when K(t,s) is unbounded as s → t.
  bool singular_diagonal() const;

  /// Normalizing constant: c_H for FbmSimple, d_H for FbmGeneral, 1 otherwise.
  double normalization() const { return norm_; }
  /// C_H with K(t,s) ≥ C_H (t−s)^{H−1/2}, FbmSimple only: c_H/(H−1/2).
  double lower_bound_constant() const;

  /// K(t,s) given lag = t − s computed by the caller (keeps accuracy when s is close to t).
  double eval_lag(double t, double s, double lag) const;

 private:
  KernelFamily family_;
  double hurst_;
  double decay_;
  double horizon_;
  double norm_ = 1.0;
};

/// K(t,s) for 0 < s < t ≤ T.
double eval_kernel(const KernelSpec& spec, double t, double s);

/// R(t,s) = E[B_t B_s]; closed forms where available, kernel quadrature otherwise.
double covariance(const KernelSpec& spec, double t, double s);

/// R(t,s) by quadrature of ∫_0^{min(t,s)} K(t,u)K(s,u)du, for every family.
double covariance_by_quadrature(const KernelSpec& spec, double t, double s);

/// ∫_a^b K(t,u)² du for 0 ≤ a < b ≤ t.
double kernel_square_integral(const KernelSpec& spec, double t, double a, double b);

/// Var(I_t^ε) = ∫_{t−ε}^t K(t,s)² ds, closed form for Brownian, RL and OU.
double tail_variance(const KernelSpec& spec, double t, double eps);

/// Var(I_t^ε) by quadrature, for every family.
double tail_variance_by_quadrature(const KernelSpec& spec, double t, double eps);

/// E|B_t − B_s|² per scalar component.
double increment_variance(const KernelSpec& spec, double t, double s);

struct ConditionFit {
  double exponent_estimate = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
  std::vector<std::pair<double, double>> grid;  // (abscissa, value)
};

/// Fits Var(I_t^ε) ~ C ε^{2A}; exponent_estimate = A.
ConditionFit fit_condition_cc1(const KernelSpec& spec, double t, const std::vector<double>& eps_grid);

/// Fits E|B_t − B_s|² ~ C |t−s|^{2H}; exponent_estimate = H. Pairs are (s, t).
ConditionFit fit_condition_cc2(const KernelSpec& spec, const std::vector<std::pair<double, double>>& pairs);

/// Fits a cc2 exponent to externally measured increment variances (e.g. Monte Carlo).
ConditionFit fit_increment_exponent(const std::vector<double>& gaps, const std::vector<double>& variances);

/// Default ε grid for cc1 at time t: 12 log-spaced points on [1e-5 t, 1e-2 t] ([1e-5 t, 1e-3 t] for OU).
std::vector<double> default_cc1_grid(const KernelSpec& spec, double t);

/// Default (s,t) pairs for cc2 ending at time t: 12 gaps log-spaced on [1e-4 T, 1e-2 T].
std::vector<std::pair<double, double>> default_cc2_pairs(const KernelSpec& spec, double t);

/// Writes a CSV table with columns t,s,K,R for all s < t drawn from the given node lists.
void write_kernel_table_csv(std::ostream& out, const KernelSpec& spec, const std::vector<double>& ts,
                            const std::vector<double>& ss);

}  // namespace vlab
