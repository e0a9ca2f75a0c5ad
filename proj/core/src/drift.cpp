#include "vlab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vlab/errors.hpp"

namespace vlab {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("drift: beta must lie in (0,1]");
}

std::vector<double> resolve_center(std::vector<double> center, std::size_t dim) {
  if (center.empty()) return std::vector<double>(dim, 0.0);
  if (center.size() != dim) throw DimensionMismatch("drift: center has wrong dimension");
  return center;
}

double capped_power(double u, double beta, double coefficient, double bound) {
  if (u == 0.0) return 0.0;
  const double mag = std::min(std::abs(coefficient) * std::pow(std::abs(u), beta), bound);
  return ((u > 0.0) == (coefficient >= 0.0)) ? mag : -mag;
}

double euclidean_factor(std::size_t dim, double beta) {
  return std::pow(static_cast<double>(dim), (1.0 - beta) / 2.0);
}

}  // namespace

std::string to_string(DriftKind k) {
  switch (k) {
    case DriftKind::HolderPower: return "HolderPower";
    case DriftKind::Constant: return "Constant";
    case DriftKind::TimeModulatedHolder: return "TimeModulatedHolder";
    case DriftKind::Custom: return "Custom";
  }
  return "unknown";
}

DriftKind drift_kind_from_string(const std::string& name) {
  for (auto k : {DriftKind::HolderPower, DriftKind::Constant, DriftKind::TimeModulatedHolder, DriftKind::Custom})
    if (to_string(k) == name) return k;
  throw DomainError("unknown drift kind '" + name + "'");
}

DriftSpec DriftSpec::zero(std::size_t dim) { return constant(std::vector<double>(dim, 0.0)); }

DriftSpec DriftSpec::constant(std::vector<double> value) {
  if (value.empty()) throw DomainError("drift: constant needs at least one component");
  DriftSpec d;
  d.kind_ = DriftKind::Constant;
  d.name_ = "constant";
  d.dim_ = value.size();
  d.beta_ = 1.0;
  for (double v : value) {
    if (!std::isfinite(v)) throw DomainError("drift: constant must be finite");
    d.bound_ = std::max(d.bound_, std::abs(v));
  }
  d.constant_ = std::move(value);
  d.center_.assign(d.dim_, 0.0);
  return d;
}

DriftSpec DriftSpec::holder_power(std::size_t dim, double beta, double coefficient, double bound,
                                  std::vector<double> center) {
  if (dim < 1) throw DomainError("drift: dim must be at least 1");
  check_beta(beta);
  if (!(bound > 0.0) || !std::isfinite(bound)) throw DomainError("drift: bound M must be positive");
  if (!std::isfinite(coefficient)) throw DomainError("drift: coefficient must be finite");
  DriftSpec d;
  d.kind_ = DriftKind::HolderPower;
  d.name_ = "holder_power";
  d.dim_ = dim;
  d.beta_ = beta;
  d.bound_ = bound;
  d.coefficient_ = coefficient;
  d.center_ = resolve_center(std::move(center), dim);
  d.holder_const_ = std::abs(coefficient) * std::pow(2.0, 1.0 - beta) * euclidean_factor(dim, beta);
  d.spot_check();
  return d;
}

DriftSpec DriftSpec::time_modulated(std::size_t dim, double beta, double coefficient, double bound, double gamma,
                                    std::vector<double> center) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("drift: time Hölder exponent γ must lie in (0,1]");
  DriftSpec d = holder_power(dim, beta, coefficient, bound, std::move(center));
  d.kind_ = DriftKind::TimeModulatedHolder;
  d.name_ = "time_modulated_holder";
  d.gamma_ = gamma;
  d.time_independent_ = false;
  d.spot_check();
  return d;
}

DriftSpec DriftSpec::custom(std::string name, std::size_t dim, double beta, double bound, double holder_const,
                            DriftFunction f, bool time_independent) {
  if (dim < 1) throw DomainError("drift: dim must be at least 1");
  check_beta(beta);
  if (!(bound > 0.0)) throw DomainError("drift: bound M must be positive");
  if (!(holder_const > 0.0)) throw DomainError("drift: Hölder constant must be positive");
  if (!f) throw DomainError("drift: custom drift needs a function");
  DriftSpec d;
  d.kind_ = DriftKind::Custom;
  d.name_ = std::move(name);
  d.dim_ = dim;
  d.beta_ = beta;
  d.bound_ = bound;
  d.holder_const_ = holder_const;
  d.center_.assign(dim, 0.0);
  d.custom_ = std::move(f);
  d.time_independent_ = time_independent;
  d.spot_check();
  return d;
}

DriftSpec DriftSpec::weierstrass(std::size_t dim, double beta, double bound, std::size_t terms,
                                 std::vector<double> center) {
  check_beta(beta);
  if (terms < 1 || terms > 40) throw DomainError("drift: weierstrass terms must lie in [1, 40]");
  constexpr double a = 2.0;
  std::vector<double> weight(terms), freq(terms), phase(terms);
  double norm = 0.0;
  for (std::size_t k = 0; k < terms; ++k) {
    freq[k] = std::pow(a, static_cast<double>(k));
    weight[k] = std::pow(a, -beta * static_cast<double>(k));
    phase[k] = 0.7 * static_cast<double>(k);
    norm += weight[k];
  }
  for (auto& w : weight) w *= bound / norm;
  // Scale split at a^k |u−v| ≈ 1 gives the per-component Hölder constant.
  double per_component;
  if (beta < 1.0) {
    per_component = bound / norm *
                    (std::pow(a, 1.0 - beta) / (std::pow(a, 1.0 - beta) - 1.0) + 2.0 / (1.0 - std::pow(a, -beta)));
  } else {
    per_component = std::max(bound / norm * static_cast<double>(terms), 2.0 * bound);
  }
  auto c = resolve_center(std::move(center), dim);
  DriftFunction f = [weight, freq, phase, c](double, const double* x, double* out) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double u = x[i] - c[i];
      double s = 0.0;
      for (std::size_t k = 0; k < weight.size(); ++k) s += weight[k] * std::cos(freq[k] * u + phase[k]);
      out[i] = s;
    }
  };
  DriftSpec d = custom("weierstrass", dim, beta, bound, per_component * euclidean_factor(dim, beta), std::move(f));
  d.center_ = c;
  d.terms_ = terms;
  return d;
}

DriftSpec DriftSpec::registered(const std::string& name, std::size_t dim, double beta, double bound,
                                std::vector<double> center) {
  if (name == "weierstrass") return weierstrass(dim, beta, bound, 14, std::move(center));
  throw DomainError("no registered custom drift named '" + name + "'");
}

bool DriftSpec::is_zero() const {
  if (kind_ == DriftKind::Constant)
    return std::all_of(constant_.begin(), constant_.end(), [](double v) { return v == 0.0; });
  return (kind_ == DriftKind::HolderPower || kind_ == DriftKind::TimeModulatedHolder) && coefficient_ == 0.0;
}

void DriftSpec::eval(double t, const double* x, double* out) const {
  switch (kind_) {
    case DriftKind::Constant:
      std::copy(constant_.begin(), constant_.end(), out);
      return;
    case DriftKind::HolderPower:
      for (std::size_t i = 0; i < dim_; ++i) out[i] = capped_power(x[i] - center_[i], beta_, coefficient_, bound_);
      return;
    case DriftKind::TimeModulatedHolder: {
      const double m = 0.5 * (1.0 + std::pow(std::abs(std::sin(std::numbers::pi * t)), *gamma_));
      for (std::size_t i = 0; i < dim_; ++i)
        out[i] = m * capped_power(x[i] - center_[i], beta_, coefficient_, bound_);
      return;
    }
    case DriftKind::Custom: custom_(t, x, out); return;
  }
}

void DriftSpec::spot_check() const {
  std::mt19937_64 gen(0x5eed);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(dim_), y(dim_), bx(dim_), by(dim_);
  for (int trial = 0; trial < 256; ++trial) {
    const double t = unit(gen);
    const double scale = std::pow(10.0, -6.0 + 6.5 * unit(gen));
    double dist2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      x[i] = center_[i] + normal(gen);
      y[i] = x[i] + scale * normal(gen);
      dist2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    eval(t, x.data(), bx.data());
    eval(t, y.data(), by.data());
    double diff2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!std::isfinite(bx[i]) || std::abs(bx[i]) > bound_ * (1.0 + 1e-12))
        throw ValidationError("drift", "spot check: |b| exceeds the declared bound M");
      diff2 += (bx[i] - by[i]) * (bx[i] - by[i]);
    }
    if (dist2 > 0.0 && std::sqrt(diff2) > holder_const_ * std::pow(std::sqrt(dist2), beta_) * (1.0 + 1e-9) + 1e-14)
      throw ValidationError("drift", "spot check: Hölder bound violated");
  }
}

PathDependentDrift::PathDependentDrift(DriftSpec state, DriftSpec memory, double weight)
    : state_(std::move(state)), memory_(std::move(memory)), weight_(weight) {
  if (state_.dim() != memory_.dim()) throw DimensionMismatch("path-dependent drift: state and memory dimensions differ");
  if (!std::isfinite(weight)) throw DomainError("path-dependent drift: weight must be finite");
}

PathDependentDrift PathDependentDrift::state_only(DriftSpec state) {
  const std::size_t d = state.dim();
  return PathDependentDrift(std::move(state), DriftSpec::zero(d), 0.0);
}

double PathDependentDrift::beta() const {
  double b = state_.is_zero() ? 1.0 : state_.beta();
  if (weight_ != 0.0 && !memory_.is_zero()) b = std::min(b, memory_.beta());
  return b;
}

double PathDependentDrift::bound() const { return state_.bound() + std::abs(weight_) * memory_.bound(); }

void PathDependentDrift::eval(double t, const double* v, const double* x, double* out) const {
  state_.eval(t, x, out);
  if (weight_ == 0.0) return;
  double buf[16];
  std::vector<double> heap;
  double* m = buf;
  if (dim() > 16) {
    heap.resize(dim());
    m = heap.data();
  }
  memory_.eval(t, v, m);
  for (std::size_t i = 0; i < dim(); ++i) out[i] += weight_ * m[i];
}

std::string to_string(VKind k) {
  switch (k) {
    case VKind::DrivingWiener: return "DrivingWiener";
    case VKind::RunningIntegralOfX: return "RunningIntegralOfX";
    case VKind::NoiseItself: return "NoiseItself";
  }
  return "unknown";
}

VKind v_kind_from_string(const std::string& name) {
  for (auto k : {VKind::DrivingWiener, VKind::RunningIntegralOfX, VKind::NoiseItself})
    if (to_string(k) == name) return k;
  throw DomainError("unknown V-process kind '" + name + "'");
}

VProcessSpec VProcessSpec::with_declared_delta(VKind kind, double beta, double noise_regularity) {
  check_beta(beta);
  VProcessSpec v;
  v.kind = kind;
  switch (kind) {
    case VKind::DrivingWiener: v.delta = beta / 2.0; break;
    case VKind::RunningIntegralOfX: v.delta = beta; break;
    case VKind::NoiseItself: v.delta = beta * noise_regularity; break;
  }
  return v;
}

}  // namespace vlab
