#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlab/sde.hpp"
#include "vlab/stats.hpp"

namespace vlab {

/// Binomial coefficient C(m, j) as a double.
double binomial(int m, int j);

/// Δ_h^m f(x) = Σ_j (−1)^{m−j} C(m,j) f(x + jh), evaluated by m rounds of first differences
/// (exactly 0 for constant f).
double finite_difference(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                         std::span<const double> h, int m);
double finite_difference(const std::function<double(double)>& f, double x, double h, int m);

/// (2π v)^{−d/2} exp(−|x|²/(2v)); x must have d entries.
double gaussian_window_density(double variance, std::span<const double> x, int d);

/// ‖Δ_{−h}^m g‖_{L1(R^d)} for the centred isotropic Gaussian density g with the given variance;
/// depends on h only through |h|.
double gaussian_difference_l1(double variance, double h_norm, int m);

/// ‖Δ_{−h}^m g‖_{L1} / (|h|/ε^A)^m.
double smoothing_bound_ratio(double variance, std::span<const double> h, int m, double A, double eps);

enum class TestFunctionKind { Cosine, HolderBump, Constant };
std::string to_string(TestFunctionKind k);
TestFunctionKind test_function_kind_from_string(const std::string& name);

/// Bounded α-Hölder test function with certified sup norm and Hölder seminorm.
class TestFunctionSpec {
 public:
  /// amplitude·cos(ω Σ x_i + phase).
  static TestFunctionSpec cosine(std::size_t dim, double alpha, double amplitude, double frequency, double phase = 0.0);
  /// amplitude·max(0, 1 − (|x − center|/radius)^α).
  static TestFunctionSpec holder_bump(std::size_t dim, double alpha, double amplitude, double radius,
                                      std::vector<double> center = {});
  static TestFunctionSpec constant(std::size_t dim, double value, double alpha = 0.5);

  TestFunctionKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  double sup_norm() const { return sup_norm_; }
  double holder_seminorm() const { return seminorm_; }
  /// ‖φ‖_{C_b^α} = sup norm + Hölder seminorm.
  double holder_norm() const { return sup_norm_ + seminorm_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  double phase() const { return phase_; }
  double radius() const { return radius_; }
  const std::vector<double>& center() const { return center_; }

  double operator()(std::span<const double> x) const;

 private:
  TestFunctionSpec() = default;
  void spot_check() const;

  TestFunctionKind kind_ = TestFunctionKind::Constant;
  std::size_t dim_ = 1;
  double alpha_ = 0.5;
  double sup_norm_ = 0.0;
  double seminorm_ = 0.0;
  double amplitude_ = 0.0;
  double frequency_ = 0.0;
  double phase_ = 0.0;
  double radius_ = 1.0;
  std::vector<double> center_;
};

/// Pe = E[Δ_h^m φ(Y_t^ε)] over the first n_paths paths (0 = all).
MeanSE estimate_pe(const SolutionEnsemble& solution, double t, double eps, const TestFunctionSpec& phi,
                   std::span<const double> h, int m, std::size_t n_paths = 0);

/// Ae = E[Δ_h^m φ(X_t) − Δ_h^m φ(Y_t^ε)] with common random numbers.
MeanSE estimate_ae(const SolutionEnsemble& solution, double t, double eps, const TestFunctionSpec& phi,
                   std::span<const double> h, int m, std::size_t n_paths = 0);

/// Ae from two independent ensembles: X from `for_x`, Y from `for_y`.
MeanSE estimate_ae_independent(const SolutionEnsemble& for_x, const SolutionEnsemble& for_y, double t, double eps,
                               const TestFunctionSpec& phi, std::span<const double> h, int m);

/// E[Δ_h^m φ(X_t)].
MeanSE estimate_difference_mean(const SolutionEnsemble& solution, double t, const TestFunctionSpec& phi,
                                std::span<const double> h, int m, std::size_t n_paths = 0);

struct ScalingPoint {
  double abscissa = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;  // log-space intercept
  double r_squared = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;  // 95% confidence interval of the slope
  double ci_high = 0.0;
  std::vector<std::size_t> used;
  std::vector<std::size_t> excluded;  // |value| < 3·std_error
};

/// Weighted least squares of log|value| on log abscissa, weights (|value|/std_error)²;
/// ordinary least squares when no point carries an error.
ScalingFit scaling_regression(const std::vector<ScalingPoint>& points);

struct TheoremExponents {
  double eta_t1 = 0.0;                 // (1 − A + βH)/A
  std::optional<double> mu;            // min(βH, δ)
  std::optional<double> eta_t2;        // (μ + 1 − A)/A
  int m = 1;
  double alpha = 1.0;
  double s = 0.0;                      // mα(1+βH)/(α(1+βH) + Am)
  double eps_rule_exponent = 0.0;      // ε = h^{m/(α(βH+1) + Am)}
  std::optional<double> s_t2;          // same with βH replaced by μ
  std::optional<double> eps_rule_exponent_t2;
  double ae_exponent = 0.0;            // (βH + 1)α
  std::optional<double> ae_exponent_t2;  // (μ + 1)α
};

TheoremExponents theorem_exponents(double A, double beta, double H, std::optional<double> delta = std::nullopt,
                                   int m = 1, double alpha = 1.0);

/// One row of a Pe/Ae sweep; bound_value = ‖φ‖_∞(|h|/ε^A)^m for Pe rows and ‖φ‖_{C^α} ε^{(βH+1)α}
/// for Ae rows.
struct SweepRow {
  double h = 0.0;
  double eps = 0.0;
  int m = 1;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound_value = 0.0;
};

struct EpsRule {
  double exponent = 0.0;
  std::string formula;
};

struct SmoothingReport {
  int m = 1;
  std::vector<double> h_grid;
  std::vector<double> eps_grid;
  std::vector<SweepRow> pe_rows;
  std::vector<SweepRow> ae_rows;
  std::optional<ScalingFit> pe_slope_in_h;
  std::optional<ScalingFit> ae_slope_in_eps;
  std::optional<double> pe_ratio_spread;  // max/min of |Pe|/bound over usable rows
  EpsRule chosen_eps_rule;
  std::vector<SweepRow> coupled_rows;  // E Δ_h^m φ(X_t) with ε = ε(h)
  std::optional<ScalingFit> coupled_slope_in_h;
};

}  // namespace vlab
