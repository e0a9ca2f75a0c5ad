#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "vlab/drift.hpp"
#include "vlab/kernels.hpp"
#include "vlab/paths.hpp"
#include "vlab/stats.hpp"

namespace vlab {

/// Euler solution X over a noise ensemble. The drift integral D_i = Σ_{j<i} b_j Δt is stored and
/// X_i is formed as (x0 + D_i) + B_i, so zero drift gives x0 + B bitwise.
class SolutionEnsemble {
 public:
  SolutionEnsemble(std::shared_ptr<const PathEnsemble> noise, std::vector<double> x0);

  const PathEnsemble& noise() const { return *noise_; }
  std::shared_ptr<const PathEnsemble> noise_ptr() const { return noise_; }
  const std::vector<double>& x0() const { return x0_; }
  const TimeGrid& grid() const { return noise_->grid(); }
  std::size_t dim() const { return noise_->dim(); }
  std::size_t n_paths() const { return noise_->n_paths(); }

  const std::optional<DriftSpec>& drift() const { return drift_; }
  const std::optional<PathDependentDrift>& path_drift() const { return path_drift_; }
  const std::optional<VProcessSpec>& v_process() const { return v_spec_; }
  bool path_dependent() const { return path_drift_.has_value(); }
  /// Sup bound of the drift per component.
  double drift_bound() const;

  double value(std::size_t p, std::size_t i, std::size_t c) const {
    return (x0_[c] + drift_integral(p, i, c)) + noise_->value(p, i, c);
  }
  double drift_integral(std::size_t p, std::size_t i, std::size_t c) const {
    return integral_[(p * grid().n_nodes() + i) * dim() + c];
  }
  double v_value(std::size_t p, std::size_t i, std::size_t c) const {
    return v_values_[(p * grid().n_nodes() + i) * dim() + c];
  }
  /// Row-major [path][node][component] copy of X.
  std::vector<double> values() const;
  /// X at node i for every path, [path][component].
  std::vector<double> values_at(std::size_t i) const;

 private:
  friend SolutionEnsemble euler_solve(const DriftSpec&, std::shared_ptr<const PathEnsemble>, std::vector<double>);
  friend SolutionEnsemble path_dependent_solve(const PathDependentDrift&, const VProcessSpec&,
                                               std::shared_ptr<const PathEnsemble>, std::vector<double>);

  std::shared_ptr<const PathEnsemble> noise_;
  std::vector<double> x0_;
  std::optional<DriftSpec> drift_;
  std::optional<PathDependentDrift> path_drift_;
  std::optional<VProcessSpec> v_spec_;
  std::vector<double> integral_;
  std::vector<double> v_values_;
};

/// X_{i+1} = X_i + b(t_i, X_i)Δt + (B_{i+1} − B_i).
SolutionEnsemble euler_solve(const DriftSpec& drift, std::shared_ptr<const PathEnsemble> noise,
                             std::vector<double> x0);

/// X_{i+1} = X_i + b(t_i, V_i, X_i)Δt + ΔB_i with V realized from the same noise.
SolutionEnsemble path_dependent_solve(const PathDependentDrift& drift, const VProcessSpec& v_spec,
                                      std::shared_ptr<const PathEnsemble> noise, std::vector<double> x0);

/// Y_s^ε for the window [t−ε, t] at node s (default s = t), per path, [path][component].
/// The drift is frozen at X_{t−ε} (and V_{t−ε}) and integrated by the composite midpoint rule.
/// For s ≤ t−ε this is X_s. Requires 0 < ε ≤ t.
std::vector<double> auxiliary_process(const SolutionEnsemble& solution, double t, double eps,
                                      std::optional<double> s = std::nullopt);

/// Monte Carlo E|X_t − Y_t^ε|^α (Euclidean norm) with standard error.
MeanSE xy_gap_moment(const SolutionEnsemble& solution, double t, double eps, double alpha);

/// Largest value of |X_{t_i} − x0 − B_{t_i}| − M t_i over paths, nodes and components (≤ 0 expected).
double drift_envelope_excess(const SolutionEnsemble& solution);

/// Fits E|V_t − V_{t−L}|^β against L over the given window lengths; exponent_estimate is δ
/// (the fitted slope itself, not half of it).
ConditionFit fit_v_moment_exponent(const SolutionEnsemble& solution, double beta, double t,
                                   const std::vector<double>& lags);

}  // namespace vlab
