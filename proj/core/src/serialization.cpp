#include "vlab/serialization.hpp"

namespace vlab {

namespace {
template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}
}  // namespace

void to_json(Json& j, const KernelSpec& k) {
  j = Json{{"family", to_string(k.family())}, {"horizon", k.horizon()}};
  if (k.family() == KernelFamily::OrnsteinUhlenbeck)
    j["decay"] = k.decay();
  else if (k.family() != KernelFamily::Brownian)
    j["hurst"] = k.hurst();
  j["normalization"] = k.normalization();
}

void to_json(Json& j, const TimeGrid& g) { j = Json{{"T", g.T}, {"n_steps", g.n_steps}}; }

void to_json(Json& j, const DriftSpec& d) {
  j = Json{{"kind", to_string(d.kind())}, {"dim", d.dim()},       {"beta", d.beta()},
           {"bound", d.bound()},          {"holder_const", d.holder_const()}};
  switch (d.kind()) {
    case DriftKind::Constant: j["value"] = d.constant_value(); break;
    case DriftKind::TimeModulatedHolder: j["gamma"] = opt(d.gamma()); [[fallthrough]];
    case DriftKind::HolderPower:
      j["coefficient"] = d.coefficient();
      j["center"] = d.center();
      break;
    case DriftKind::Custom:
      j["name"] = d.name();
      j["center"] = d.center();
      if (d.terms() > 0) j["terms"] = d.terms();
      break;
  }
}

void to_json(Json& j, const PathDependentDrift& d) {
  j = Json{{"state", d.state()}, {"memory", d.memory()}, {"weight", d.weight()}, {"beta", d.beta()},
           {"bound", d.bound()}};
}

void to_json(Json& j, const VProcessSpec& v) { j = Json{{"kind", to_string(v.kind)}, {"delta", v.delta}}; }

void to_json(Json& j, const TestFunctionSpec& f) {
  j = Json{{"kind", to_string(f.kind())},   {"dim", f.dim()},
           {"alpha", f.alpha()},            {"sup_norm", f.sup_norm()},
           {"holder_seminorm", f.holder_seminorm()}, {"amplitude", f.amplitude()}};
  if (f.kind() == TestFunctionKind::Cosine) {
    j["frequency"] = f.frequency();
    j["phase"] = f.phase();
  } else if (f.kind() == TestFunctionKind::HolderBump) {
    j["radius"] = f.radius();
    j["center"] = f.center();
  }
}

void to_json(Json& j, const MeanSE& m) { j = Json{{"estimate", m.mean}, {"std_error", m.std_error}}; }

void to_json(Json& j, const LinearFit& f) {
  j = Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"slope_se", f.slope_se},
           {"n", f.n}};
}

void to_json(Json& j, const ConditionFit& f) {
  j = Json{{"exponent_estimate", f.exponent_estimate}, {"slope", f.slope}, {"intercept", f.intercept},
           {"r_squared", f.r_squared}, {"slope_se", f.slope_se}};
  Json grid = Json::array();
  for (const auto& [x, y] : f.grid) grid.push_back(Json::array({x, y}));
  j["grid"] = std::move(grid);
}

void to_json(Json& j, const ScalingFit& f) {
  j = Json{{"slope", f.slope},       {"intercept", f.intercept}, {"r_squared", f.r_squared},
           {"slope_se", f.slope_se}, {"ci_low", f.ci_low},       {"ci_high", f.ci_high},
           {"used", f.used},         {"excluded", f.excluded}};
}

void to_json(Json& j, const SweepRow& r) {
  j = Json{{"h", r.h},     {"eps", r.eps},           {"m", r.m},
           {"estimate", r.estimate}, {"std_error", r.std_error}, {"bound_value", r.bound_value}};
}

void to_json(Json& j, const EpsRule& r) { j = Json{{"exponent", r.exponent}, {"formula", r.formula}}; }

void to_json(Json& j, const SmoothingReport& r) {
  j = Json{{"m", r.m},
           {"h_grid", r.h_grid},
           {"eps_grid", r.eps_grid},
           {"pe_rows", r.pe_rows},
           {"ae_rows", r.ae_rows},
           {"pe_slope_in_h", opt(r.pe_slope_in_h)},
           {"ae_slope_in_eps", opt(r.ae_slope_in_eps)},
           {"pe_ratio_spread", opt(r.pe_ratio_spread)},
           {"chosen_eps_rule", r.chosen_eps_rule},
           {"coupled_rows", r.coupled_rows},
           {"coupled_slope_in_h", opt(r.coupled_slope_in_h)}};
}

void to_json(Json& j, const TheoremExponents& e) {
  j = Json{{"eta_t1", e.eta_t1},
           {"mu", opt(e.mu)},
           {"eta_t2", opt(e.eta_t2)},
           {"m", e.m},
           {"alpha", e.alpha},
           {"s", e.s},
           {"eps_rule_exponent", e.eps_rule_exponent},
           {"s_t2", opt(e.s_t2)},
           {"eps_rule_exponent_t2", opt(e.eps_rule_exponent_t2)},
           {"ae_exponent", e.ae_exponent},
           {"ae_exponent_t2", opt(e.ae_exponent_t2)}};
}

void to_json(Json& j, const DensityEstimate& d) {
  j = Json{{"method", to_string(d.method)},
           {"grid_start", d.grid_start},
           {"spacing", d.spacing},
           {"values", d.values},
           {"bandwidth_or_binwidth", d.bandwidth_or_binwidth},
           {"n_samples", d.n_samples},
           {"dim", d.dim},
           {"sample_min", d.sample_min},
           {"sample_max", d.sample_max}};
}

void to_json(Json& j, const BesovReport& r) {
  j = Json{{"m", r.m},
           {"h_grid", r.h_grid},
           {"diff_l1_norms", r.diff_l1_norms},
           {"noise_floor", r.noise_floor},
           {"s_evaluated", r.s_evaluated},
           {"seminorm_sup", r.seminorm_sup},
           {"l1_norm", r.l1_norm},
           {"besov_norm", r.besov_norm},
           {"exponent_estimate", r.exponent_estimate},
           {"exponent_r_squared", r.exponent_r_squared},
           {"fit_h_low", r.fit_h_low},
           {"fit_h_high", r.fit_h_high},
           {"theoretical_eta", opt(r.theoretical_eta)},
           {"saturation_flag", r.saturation_flag},
           {"binwidth", r.binwidth}};
}

void to_json(Json& j, const Verdict& v) {
  j = Json{{"eta", v.eta},
           {"uses_path_dependent_bound", v.uses_path_dependent_bound},
           {"mu", opt(v.mu)},
           {"s_hat", v.s_hat},
           {"saturated", v.saturated},
           {"tolerance", v.tolerance},
           {"verdict", v.consistent ? "consistent" : "inconsistent"},
           {"reason", v.reason}};
}

Json ensemble_metadata(const PathEnsemble& e) {
  return Json{{"kernel", e.kernel()}, {"grid", e.grid()},           {"dim", e.dim()},
              {"n_paths", e.n_paths()}, {"first_path", e.first_path()}, {"seed", e.seed()},
              {"scheme", to_string(e.scheme())}};
}

}  // namespace vlab
