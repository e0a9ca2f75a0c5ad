#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vlab {

enum class DriftKind { HolderPower, Constant, TimeModulatedHolder, Custom };
std::string to_string(DriftKind k);
DriftKind drift_kind_from_string(const std::string& name);

/// b(t, x) written into out[0..dim).
using DriftFunction = std::function<void(double t, const double* x, double* out)>;

/// Bounded β-Hölder drift. `bound` is a sup bound per component; `holder_const` is the Hölder
/// constant in the Euclidean norm. Both are spot-checked at construction.
class DriftSpec {
 public:
  static DriftSpec zero(std::size_t dim);
  static DriftSpec constant(std::vector<double> value);
  /// b_i = sgn(c)·sign(u_i)·min(|c||u_i|^β, M), u = x − center.
  static DriftSpec holder_power(std::size_t dim, double beta, double coefficient, double bound,
                                std::vector<double> center = {});
  /// HolderPower scaled by m(t) = (1 + |sin πt|^γ)/2.
  static DriftSpec time_modulated(std::size_t dim, double beta, double coefficient, double bound, double gamma,
                                  std::vector<double> center = {});
  /// User-supplied drift with declared constants.
  static DriftSpec custom(std::string name, std::size_t dim, double beta, double bound, double holder_const,
                          DriftFunction f, bool time_independent = true);
  /// Truncated Weierstrass sum per component, M·Σ_k a^{−kβ}cos(a^k u + 0.7k)/Σ_k a^{−kβ},
  /// a = 2; β-Hölder down to scale 2^{−terms}.
  static DriftSpec weierstrass(std::size_t dim, double beta, double bound, std::size_t terms = 14,
                               std::vector<double> center = {});
  /// Builds a registered custom drift by name ("weierstrass").
  static DriftSpec registered(const std::string& name, std::size_t dim, double beta, double bound,
                              std::vector<double> center = {});

  DriftKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  double beta() const { return beta_; }
  double bound() const { return bound_; }
  double holder_const() const { return holder_const_; }
  double coefficient() const { return coefficient_; }
  const std::vector<double>& center() const { return center_; }
  const std::vector<double>& constant_value() const { return constant_; }
  std::optional<double> gamma() const { return gamma_; }
  std::size_t terms() const { return terms_; }
  bool time_independent() const { return time_independent_; }
  /// True when b ≡ 0.
  bool is_zero() const;

  void eval(double t, const double* x, double* out) const;

 private:
  DriftSpec() = default;
  void spot_check() const;

  DriftKind kind_ = DriftKind::Constant;
  std::string name_;
  std::size_t dim_ = 1;
  double beta_ = 1.0;
  double bound_ = 0.0;
  double holder_const_ = 0.0;
  double coefficient_ = 0.0;
  std::vector<double> center_;
  std::vector<double> constant_;
  std::optional<double> gamma_;
  std::size_t terms_ = 0;
  bool time_independent_ = true;
  DriftFunction custom_;
};

/// Drift of the path-dependent equation: b(t, v, x) = state(t, x) + weight·memory(t, v).
class PathDependentDrift {
 public:
  PathDependentDrift(DriftSpec state, DriftSpec memory, double weight);
  static PathDependentDrift state_only(DriftSpec state);

  const DriftSpec& state() const { return state_; }
  const DriftSpec& memory() const { return memory_; }
  double weight() const { return weight_; }
  std::size_t dim() const { return state_.dim(); }
  double beta() const;
  double bound() const;
  bool is_zero() const { return state_.is_zero() && (weight_ == 0.0 || memory_.is_zero()); }

  void eval(double t, const double* v, const double* x, double* out) const;

 private:
  DriftSpec state_;
  DriftSpec memory_;
  double weight_;
};

enum class VKind { DrivingWiener, RunningIntegralOfX, NoiseItself };
std::string to_string(VKind k);
VKind v_kind_from_string(const std::string& name);

/// The auxiliary process V of the path-dependent equation with its declared moment exponent δ:
/// E|V_t − V_s|^β ≤ C|t−s|^δ.
struct VProcessSpec {
  VKind kind = VKind::DrivingWiener;
  double delta = 0.5;

  /// δ implied by the kind: β/2 for W, β for ∫X, βH for the noise itself.
  static VProcessSpec with_declared_delta(VKind kind, double beta, double noise_regularity);
};

}  // namespace vlab
