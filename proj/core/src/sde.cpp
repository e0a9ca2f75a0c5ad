#include "vlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

namespace {

void check_dims(std::size_t drift_dim, const PathEnsemble& noise, const std::vector<double>& x0) {
  if (drift_dim != noise.dim()) throw DimensionMismatch("solver: drift dimension differs from the noise dimension");
  if (x0.size() != noise.dim()) throw DimensionMismatch("solver: x0 dimension differs from the noise dimension");
}

}  // namespace

SolutionEnsemble::SolutionEnsemble(std::shared_ptr<const PathEnsemble> noise, std::vector<double> x0)
    : noise_(std::move(noise)), x0_(std::move(x0)) {
  if (!noise_) throw DomainError("solver: null noise ensemble");
  integral_.assign(noise_->n_paths() * noise_->grid().n_nodes() * noise_->dim(), 0.0);
}

double SolutionEnsemble::drift_bound() const { return drift_ ? drift_->bound() : path_drift_->bound(); }

std::vector<double> SolutionEnsemble::values() const {
  const std::size_t nn = grid().n_nodes(), d = dim();
  std::vector<double> out(n_paths() * nn * d);
  for (std::size_t p = 0; p < n_paths(); ++p)
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t c = 0; c < d; ++c) out[(p * nn + i) * d + c] = value(p, i, c);
  return out;
}

std::vector<double> SolutionEnsemble::values_at(std::size_t i) const {
  if (i >= grid().n_nodes()) throw DomainError("values_at: node index out of range");
  const std::size_t d = dim();
  std::vector<double> out(n_paths() * d);
  for (std::size_t p = 0; p < n_paths(); ++p)
    for (std::size_t c = 0; c < d; ++c) out[p * d + c] = value(p, i, c);
  return out;
}

SolutionEnsemble euler_solve(const DriftSpec& drift, std::shared_ptr<const PathEnsemble> noise,
                             std::vector<double> x0) {
  if (!noise) throw DomainError("euler_solve: null noise ensemble");
  check_dims(drift.dim(), *noise, x0);
  SolutionEnsemble sol(noise, std::move(x0));
  sol.drift_ = drift;
  if (drift.is_zero()) return sol;
  const TimeGrid& grid = noise->grid();
  const std::size_t d = noise->dim(), nn = grid.n_nodes();
  const double dt = grid.dt();
  parallel_for(noise->n_paths(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x(d), b(d);
    for (std::size_t p = lo; p < hi; ++p) {
      double* D = &sol.integral_[p * nn * d];
      for (std::size_t i = 0; i + 1 < nn; ++i) {
        for (std::size_t c = 0; c < d; ++c) x[c] = (sol.x0_[c] + D[i * d + c]) + noise->value(p, i, c);
        drift.eval(grid.node(i), x.data(), b.data());
        for (std::size_t c = 0; c < d; ++c) D[(i + 1) * d + c] = D[i * d + c] + b[c] * dt;
      }
    }
  });
  return sol;
}

SolutionEnsemble path_dependent_solve(const PathDependentDrift& drift, const VProcessSpec& v_spec,
                                      std::shared_ptr<const PathEnsemble> noise, std::vector<double> x0) {
  if (!noise) throw DomainError("path_dependent_solve: null noise ensemble");
  check_dims(drift.dim(), *noise, x0);
  if (!(v_spec.delta > 0.0)) throw DomainError("path_dependent_solve: δ must be positive");
  if (v_spec.kind == VKind::DrivingWiener && !noise->has_increments())
    throw UnsupportedSchemeError("path_dependent_solve: V = W needs an ensemble with Wiener increments");
  SolutionEnsemble sol(noise, std::move(x0));
  sol.path_drift_ = drift;
  sol.v_spec_ = v_spec;
  const TimeGrid& grid = noise->grid();
  const std::size_t d = noise->dim(), nn = grid.n_nodes();
  const double dt = grid.dt();
  sol.v_values_.assign(noise->n_paths() * nn * d, 0.0);
  parallel_for(noise->n_paths(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x(d), b(d);
    for (std::size_t p = lo; p < hi; ++p) {
      double* D = &sol.integral_[p * nn * d];
      double* V = &sol.v_values_[p * nn * d];
      for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
          x[c] = (sol.x0_[c] + D[i * d + c]) + noise->value(p, i, c);
          if (v_spec.kind == VKind::NoiseItself) V[i * d + c] = noise->value(p, i, c);
        }
        if (i + 1 == nn) break;
        drift.eval(grid.node(i), &V[i * d], x.data(), b.data());
        for (std::size_t c = 0; c < d; ++c) {
          D[(i + 1) * d + c] = D[i * d + c] + b[c] * dt;
          if (v_spec.kind == VKind::DrivingWiener)
            V[(i + 1) * d + c] = V[i * d + c] + noise->increment(p, i, c);
          else if (v_spec.kind == VKind::RunningIntegralOfX)
            V[(i + 1) * d + c] = V[i * d + c] + x[c] * dt;
        }
      }
    }
  });
  return sol;
}

std::vector<double> auxiliary_process(const SolutionEnsemble& sol, double t, double eps, std::optional<double> s) {
  const TimeGrid& grid = sol.grid();
  const std::size_t it = grid.node_index(t);
  const std::size_t steps = grid.steps_in(eps);
  if (steps > it) throw DomainError("auxiliary_process: requires ε ≤ t");
  const std::size_t k = it - steps;
  const std::size_t m = s ? grid.node_index(*s) : it;
  if (m > it) throw DomainError("auxiliary_process: s must not exceed t");
  const std::size_t d = sol.dim();
  std::vector<double> out(sol.n_paths() * d);
  if (m <= k) {
    for (std::size_t p = 0; p < sol.n_paths(); ++p)
      for (std::size_t c = 0; c < d; ++c) out[p * d + c] = sol.value(p, m, c);
    return out;
  }
  const double dt = grid.dt();
  parallel_for(sol.n_paths(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> xk(d), vk(d), b(d), acc(d);
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t c = 0; c < d; ++c) {
        xk[c] = sol.value(p, k, c);
        if (sol.path_dependent()) vk[c] = sol.v_value(p, k, c);
        acc[c] = sol.drift_integral(p, k, c);
      }
      // Accumulating from D_k in the solver's order makes Y = X bitwise when b is constant.
      for (std::size_t j = k; j < m; ++j) {
        const double tm = grid.node(j) + 0.5 * dt;
        if (sol.path_dependent())
          sol.path_drift()->eval(tm, vk.data(), xk.data(), b.data());
        else
          sol.drift()->eval(tm, xk.data(), b.data());
        for (std::size_t c = 0; c < d; ++c) acc[c] = acc[c] + b[c] * dt;
      }
      for (std::size_t c = 0; c < d; ++c) out[p * d + c] = (sol.x0()[c] + acc[c]) + sol.noise().value(p, m, c);
    }
  });
  return out;
}

MeanSE xy_gap_moment(const SolutionEnsemble& sol, double t, double eps, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("xy_gap_moment: α must lie in (0,1]");
  const std::vector<double> y = auxiliary_process(sol, t, eps);
  const std::size_t i = sol.grid().node_index(t), d = sol.dim();
  std::vector<double> r(sol.n_paths());
  for (std::size_t p = 0; p < sol.n_paths(); ++p) {
    double n2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = sol.value(p, i, c) - y[p * d + c];
      n2 += diff * diff;
    }
    r[p] = n2 == 0.0 ? 0.0 : std::pow(std::sqrt(n2), alpha);
  }
  return mean_se(r);
}

double drift_envelope_excess(const SolutionEnsemble& sol) {
  const double m = sol.drift_bound();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < sol.n_paths(); ++p)
    for (std::size_t i = 0; i < sol.grid().n_nodes(); ++i)
      for (std::size_t c = 0; c < sol.dim(); ++c) {
        const double dev = std::abs(sol.value(p, i, c) - sol.x0()[c] - sol.noise().value(p, i, c));
        worst = std::max(worst, dev - m * sol.grid().node(i));
      }
  return worst;
}

ConditionFit fit_v_moment_exponent(const SolutionEnsemble& sol, double beta, double t,
                                   const std::vector<double>& lags) {
  if (!sol.path_dependent()) throw DomainError("fit_v_moment_exponent: solution has no V process");
  if (lags.size() < 3) throw InsufficientDataError("fit_v_moment_exponent: need at least 3 lags");
  const TimeGrid& grid = sol.grid();
  const std::size_t it = grid.node_index(t), d = sol.dim();
  std::vector<double> lx, ly;
  ConditionFit fit;
  for (double lag : lags) {
    const std::size_t steps = grid.steps_in(lag);
    if (steps > it) throw DomainError("fit_v_moment_exponent: lag exceeds t");
    std::vector<double> m(sol.n_paths() * d);
    for (std::size_t p = 0; p < sol.n_paths(); ++p)
      for (std::size_t c = 0; c < d; ++c)
        m[p * d + c] = std::pow(std::abs(sol.v_value(p, it, c) - sol.v_value(p, it - steps, c)), beta);
    const double moment = mean_se(m).mean;
    if (!(moment > 0.0)) throw InsufficientDataError("fit_v_moment_exponent: zero moment");
    fit.grid.emplace_back(lag, moment);
    lx.push_back(std::log(lag));
    ly.push_back(std::log(moment));
  }
  const LinearFit lf = ols(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = std::exp(lf.intercept);
  fit.r_squared = lf.r_squared;
  fit.slope_se = lf.slope_se;
  fit.exponent_estimate = lf.slope;
  return fit;
}

}  // namespace vlab
