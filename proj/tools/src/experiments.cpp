#include "vlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "vlab/ensemble_io.hpp"
#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/sde.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

// ---------------------------------------------------------------------------
// Field readers. Every error names the dotted path of the entry.

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void only_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(path.empty() ? "config" : path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(join(path, key), "unknown field");
  }
}

double get_number(const Json& j, const std::string& key, const std::string& path, std::optional<double> dflt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ValidationError(join(path, key), "missing required field");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(join(path, key), "must be finite");
  return x;
}

std::uint64_t get_count(const Json& j, const std::string& key, const std::string& path,
                        std::optional<std::uint64_t> dflt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ValidationError(join(path, key), "missing required field");
  }
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ValidationError(join(path, key), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& path,
                       std::optional<std::string> dflt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ValidationError(join(path, key), "missing required field");
  }
  if (!j.at(key).is_string()) throw ValidationError(join(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

bool get_bool(const Json& j, const std::string& key, const std::string& path, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) throw ValidationError(join(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

std::vector<double> get_vector(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return {};
  const Json& v = j.at(key);
  if (!v.is_array()) throw ValidationError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(join(path, key), "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Either an explicit list or {"min","max","n"} (log-spaced).
std::vector<double> get_grid(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return {};
  const Json& v = j.at(key);
  if (v.is_object()) {
    const std::string p = join(path, key);
    only_keys(v, p, {"min", "max", "n"});
    const double lo = get_number(v, "min", p, std::nullopt);
    const double hi = get_number(v, "max", p, std::nullopt);
    const auto n = get_count(v, "n", p, std::nullopt);
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ValidationError(p, "need 0 < min < max and n ≥ 2");
    return logspace(lo, hi, n);
  }
  return get_vector(j, key, path);
}

// Runs a builder and reports its domain errors against the given field.
template <class F>
auto validated(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
}

DriftConfig parse_drift(const Json& j, const std::string& path) {
  only_keys(j, path, {"kind", "beta", "coefficient", "bound", "gamma", "terms", "center", "value"});
  DriftConfig d;
  d.kind = get_string(j, "kind", path, std::nullopt);
  d.beta = get_number(j, "beta", path, 1.0);
  d.coefficient = get_number(j, "coefficient", path, 1.0);
  d.bound = get_number(j, "bound", path, 1.0);
  d.gamma = get_number(j, "gamma", path, 1.0);
  d.terms = get_count(j, "terms", path, 14);
  d.center = get_vector(j, "center", path);
  d.value = get_vector(j, "value", path);
  return d;
}

Json drift_to_json(const DriftConfig& d) {
  return Json{{"kind", d.kind},   {"beta", d.beta},   {"coefficient", d.coefficient}, {"bound", d.bound},
              {"gamma", d.gamma}, {"terms", d.terms}, {"center", d.center},           {"value", d.value}};
}

// ---------------------------------------------------------------------------
// Construction of the numeric objects from a validated config.

struct Model {
  KernelSpec kernel;
  std::optional<DriftSpec> drift;
  std::optional<PathDependentDrift> path_drift;
  std::optional<VProcessSpec> v_spec;
  double beta = 1.0;
};

Model build_model(const ExperimentConfig& c) {
  Model m{c.kernel.build(c.grid.T), std::nullopt, std::nullopt, std::nullopt, 1.0};
  DriftSpec state = c.drift.build(c.dim);
  if (c.path_dependent) {
    const auto& pd = *c.path_dependent;
    PathDependentDrift drift2(state, pd.memory.build(c.dim), pd.weight);
    VProcessSpec v = VProcessSpec::with_declared_delta(v_kind_from_string(pd.v_kind), drift2.beta(), m.kernel.hurst());
    if (pd.delta) v.delta = *pd.delta;
    m.beta = drift2.beta();
    m.path_drift = std::move(drift2);
    m.v_spec = v;
  } else {
    m.beta = state.beta();
    m.drift = std::move(state);
  }
  return m;
}

std::vector<double> initial_state(const ExperimentConfig& c) {
  return c.x0.empty() ? std::vector<double>(c.dim, 0.0) : c.x0;
}

std::shared_ptr<const PathEnsemble> sample_noise(const ExperimentConfig& c, const KernelSpec& spec, std::size_t n,
                                                 std::size_t first) {
  if (c.scheme == Scheme::Exact)
    return std::make_shared<const PathEnsemble>(exact_sample(spec, c.grid, c.dim, n, c.seed, first));
  return std::make_shared<const PathEnsemble>(kernel_discretized_sample(spec, c.grid, c.dim, n, c.seed, first));
}

SolutionEnsemble solve_model(const ExperimentConfig& c, const Model& m, std::shared_ptr<const PathEnsemble> noise) {
  if (m.path_drift) return path_dependent_solve(*m.path_drift, *m.v_spec, std::move(noise), initial_state(c));
  return euler_solve(*m.drift, std::move(noise), initial_state(c));
}

std::optional<double> model_delta(const Model& m) {
  return m.v_spec ? std::optional<double>(m.v_spec->delta) : std::nullopt;
}

std::filesystem::path out_path(const ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output_dir);
  return std::filesystem::path(c.output_dir) / name;
}

bool writes_files(const ExperimentConfig& c) { return !c.output_dir.empty(); }

std::size_t paths_to_export(std::size_t n) { return std::min<std::size_t>(n, 10); }

std::vector<std::size_t> first_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

void write_rows_csv(const std::filesystem::path& file, const std::vector<SweepRow>& rows) {
  std::ofstream out(file);
  out.precision(17);
  out << "h,eps,m,estimate,std_error,bound_value\n";
  for (const auto& r : rows)
    out << r.h << ',' << r.eps << ',' << r.m << ',' << r.estimate << ',' << r.std_error << ',' << r.bound_value << '\n';
}

std::vector<double> default_eps_grid(const TimeGrid& grid, double t) {
  const std::size_t nt = grid.node_index(t);
  const double hi = std::max(1.0, std::floor(nt / 4.0));
  const double lo = std::max(1.0, std::floor(nt / 32.0));
  std::vector<double> out;
  std::set<std::size_t> seen;
  for (double k : logspace(lo, std::max(hi, lo), lo < hi ? 7 : 1)) {
    const auto ki = static_cast<std::size_t>(std::round(k));
    if (seen.insert(ki).second) out.push_back(static_cast<double>(ki) * grid.dt());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

KernelSpec KernelConfig::build(double horizon) const {
  switch (kernel_family_from_string(family)) {
    case KernelFamily::Brownian: return KernelSpec::brownian(horizon);
    case KernelFamily::FbmGeneral: return KernelSpec::fbm_general(hurst, horizon);
    case KernelFamily::FbmSimple: return KernelSpec::fbm_simple(hurst, horizon);
    case KernelFamily::RiemannLiouville: return KernelSpec::riemann_liouville(hurst, horizon);
    case KernelFamily::OrnsteinUhlenbeck: return KernelSpec::ornstein_uhlenbeck(decay, horizon);
  }
  throw DomainError("unknown kernel family");
}

DriftSpec DriftConfig::build(std::size_t dim) const {
  if (kind == "Zero") return DriftSpec::zero(dim);
  if (kind == "Constant") {
    std::vector<double> v = value;
    if (v.size() == 1 && dim > 1) v.assign(dim, value[0]);
    if (v.size() != dim) throw DimensionMismatch("constant drift value must have dim entries");
    return DriftSpec::constant(v);
  }
  if (kind == "HolderPower") return DriftSpec::holder_power(dim, beta, coefficient, bound, center);
  if (kind == "TimeModulatedHolder") return DriftSpec::time_modulated(dim, beta, coefficient, bound, gamma, center);
  if (kind == "Weierstrass") return DriftSpec::weierstrass(dim, beta, bound, terms, center);
  throw DomainError("unknown drift kind '" + kind + "'");
}

TestFunctionSpec TestFunctionConfig::build(std::size_t dim) const {
  switch (test_function_kind_from_string(kind)) {
    case TestFunctionKind::Cosine: return TestFunctionSpec::cosine(dim, alpha, amplitude, frequency, phase);
    case TestFunctionKind::HolderBump: return TestFunctionSpec::holder_bump(dim, alpha, amplitude, radius, center);
    case TestFunctionKind::Constant: return TestFunctionSpec::constant(dim, value, alpha);
  }
  throw DomainError("unknown test function kind");
}

ExperimentConfig parse_config(const Json& j) {
  only_keys(j, "", {"command", "seed", "n_paths", "kernel", "grid", "scheme", "dim", "x0", "drift", "path_dependent",
                    "test_function", "sweep", "density", "conditions", "output_dir", "emit"});
  ExperimentConfig c;
  c.command = get_string(j, "command", "", std::string());
  c.seed = get_count(j, "seed", "", std::nullopt);
  c.n_paths = get_count(j, "n_paths", "", std::nullopt);
  c.dim = get_count(j, "dim", "", 1);
  if (c.dim < 1 || c.dim > 3) throw ValidationError("dim", "must be 1, 2 or 3");
  c.x0 = get_vector(j, "x0", "");
  if (!c.x0.empty() && c.x0.size() != c.dim) throw ValidationError("x0", "must have dim entries");
  c.output_dir = get_string(j, "output_dir", "", std::string());
  c.scheme = validated("scheme", [&] { return scheme_from_string(get_string(j, "scheme", "", "KernelDiscretized")); });

  if (!j.contains("kernel")) throw ValidationError("kernel", "missing required field");
  const Json& jk = j.at("kernel");
  only_keys(jk, "kernel", {"family", "hurst", "decay"});
  c.kernel.family = get_string(jk, "family", "kernel", std::nullopt);
  validated("kernel.family", [&] { return kernel_family_from_string(c.kernel.family); });
  c.kernel.hurst = get_number(jk, "hurst", "kernel", 0.5);
  c.kernel.decay = get_number(jk, "decay", "kernel", 1.0);

  if (j.contains("grid")) {
    const Json& jg = j.at("grid");
    only_keys(jg, "grid", {"T", "n_steps"});
    const double T = get_number(jg, "T", "grid", 1.0);
    const auto n = get_count(jg, "n_steps", "grid", 64);
    c.grid = validated("grid", [&] { return TimeGrid(T, n); });
  }
  try {
    c.kernel.build(c.grid.T);
  } catch (const Error& e) {
    const std::string msg = e.what();
    const std::string field = msg.find("hurst") != std::string::npos   ? "kernel.hurst"
                              : msg.find("decay") != std::string::npos ? "kernel.decay"
                                                                       : "kernel";
    throw ValidationError(field, msg);
  }

  if (j.contains("drift")) c.drift = parse_drift(j.at("drift"), "drift");
  validated("drift", [&] { return c.drift.build(c.dim); });

  if (j.contains("path_dependent") && !j.at("path_dependent").is_null()) {
    const Json& jp = j.at("path_dependent");
    only_keys(jp, "path_dependent", {"memory", "weight", "v_kind", "delta"});
    PathDependentConfig pd;
    if (!jp.contains("memory")) throw ValidationError("path_dependent.memory", "missing required field");
    pd.memory = parse_drift(jp.at("memory"), "path_dependent.memory");
    pd.weight = get_number(jp, "weight", "path_dependent", 1.0);
    pd.v_kind = get_string(jp, "v_kind", "path_dependent", "DrivingWiener");
    validated("path_dependent.v_kind", [&] { return v_kind_from_string(pd.v_kind); });
    if (jp.contains("delta") && !jp.at("delta").is_null()) {
      pd.delta = get_number(jp, "delta", "path_dependent", std::nullopt);
      if (!(*pd.delta > 0.0)) throw ValidationError("path_dependent.delta", "must be positive");
    }
    validated("path_dependent.memory", [&] { return pd.memory.build(c.dim); });
    c.path_dependent = pd;
  }

  if (j.contains("test_function")) {
    const Json& jt = j.at("test_function");
    only_keys(jt, "test_function", {"kind", "alpha", "amplitude", "frequency", "phase", "radius", "center", "value"});
    auto& t = c.test_function;
    t.kind = get_string(jt, "kind", "test_function", "Cosine");
    t.alpha = get_number(jt, "alpha", "test_function", 0.9);
    t.amplitude = get_number(jt, "amplitude", "test_function", 1.0);
    t.frequency = get_number(jt, "frequency", "test_function", 1.0);
    t.phase = get_number(jt, "phase", "test_function", 0.3);
    t.radius = get_number(jt, "radius", "test_function", 1.0);
    t.center = get_vector(jt, "center", "test_function");
    t.value = get_number(jt, "value", "test_function", 1.0);
  }
  validated("test_function", [&] { return c.test_function.build(c.dim); });

  if (j.contains("sweep")) {
    const Json& js = j.at("sweep");
    only_keys(js, "sweep", {"t", "m", "h_grid", "pe_eps", "eps_grid", "ae_h", "coupled", "A"});
    auto& s = c.sweep;
    s.t = get_number(js, "t", "sweep", c.grid.T);
    s.m = static_cast<int>(get_count(js, "m", "sweep", 1));
    s.h_grid = get_grid(js, "h_grid", "sweep");
    s.pe_eps = get_number(js, "pe_eps", "sweep", 0.25);
    s.eps_grid = get_grid(js, "eps_grid", "sweep");
    s.ae_h = get_number(js, "ae_h", "sweep", 0.25);
    s.coupled = get_bool(js, "coupled", "sweep", true);
    if (js.contains("A") && !js.at("A").is_null()) s.A = get_number(js, "A", "sweep", std::nullopt);
  } else {
    c.sweep.t = c.grid.T;
  }
  auto& s = c.sweep;
  if (s.m < 1) throw ValidationError("sweep.m", "must be at least 1");
  validated("sweep.t", [&] { return c.grid.node_index(s.t); });
  if (s.h_grid.empty()) s.h_grid = logspace(0.01, 0.1, 8);
  for (double h : s.h_grid)
    if (!(h > 0.0)) throw ValidationError("sweep.h_grid", "entries must be positive");
  if (!(s.ae_h > 0.0)) throw ValidationError("sweep.ae_h", "must be positive");
  if (s.eps_grid.empty()) s.eps_grid = default_eps_grid(c.grid, s.t);
  for (double e : s.eps_grid) {
    const std::size_t k = validated("sweep.eps_grid", [&] { return c.grid.steps_in(e); });
    if (e > s.t * (1.0 + 1e-12)) throw ValidationError("sweep.eps_grid", "entries must not exceed sweep.t");
    (void)k;
  }
  const std::size_t pe_k = validated("sweep.pe_eps", [&] { return c.grid.steps_in(s.pe_eps); });
  if (pe_k > c.grid.node_index(s.t)) throw ValidationError("sweep.pe_eps", "must not exceed sweep.t");
  if (s.A && !(*s.A > 0.0 && *s.A <= 1.0)) throw ValidationError("sweep.A", "must lie in (0,1]");

  if (j.contains("density")) {
    const Json& jd = j.at("density");
    only_keys(jd, "density", {"t", "method", "resolution", "m", "n_lags", "chunk_paths"});
    auto& d = c.density;
    d.t = get_number(jd, "t", "density", c.grid.T);
    d.method = get_string(jd, "method", "density", "Histogram");
    d.resolution = get_number(jd, "resolution", "density", kDefaultBins);
    d.m = static_cast<int>(get_count(jd, "m", "density", 2));
    d.n_lags = get_count(jd, "n_lags", "density", 16);
    d.chunk_paths = get_count(jd, "chunk_paths", "density", 100000);
  } else {
    c.density.t = c.grid.T;
  }
  validated("density.method", [&] { return density_method_from_string(c.density.method); });
  validated("density.t", [&] { return c.grid.node_index(c.density.t); });
  if (c.density.m < 1) throw ValidationError("density.m", "must be at least 1");
  if (c.density.n_lags < 3) throw ValidationError("density.n_lags", "must be at least 3");
  if (c.density.chunk_paths < 1) throw ValidationError("density.chunk_paths", "must be positive");
  if (!(c.density.resolution >= 0.0)) throw ValidationError("density.resolution", "must be nonnegative");

  c.conditions_t = c.grid.T;
  if (j.contains("conditions")) {
    only_keys(j.at("conditions"), "conditions", {"t"});
    c.conditions_t = get_number(j.at("conditions"), "t", "conditions", c.grid.T);
  }
  if (!(c.conditions_t > 0.0 && c.conditions_t <= c.grid.T * (1.0 + 1e-12)))
    throw ValidationError("conditions.t", "must lie in (0, T]");

  if (j.contains("emit")) {
    const Json& je = j.at("emit");
    only_keys(je, "emit", {"json", "csv", "binary"});
    c.emit.json = get_bool(je, "json", "emit", true);
    c.emit.csv = get_bool(je, "csv", "emit", true);
    c.emit.binary = get_bool(je, "binary", "emit", false);
  }

  if (c.path_dependent && v_kind_from_string(c.path_dependent->v_kind) == VKind::DrivingWiener &&
      c.scheme == Scheme::Exact)
    throw ValidationError("scheme", "a DrivingWiener V process needs the KernelDiscretized scheme");
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j{{"seed", c.seed},
         {"n_paths", c.n_paths},
         {"kernel", {{"family", c.kernel.family}, {"hurst", c.kernel.hurst}, {"decay", c.kernel.decay}}},
         {"grid", {{"T", c.grid.T}, {"n_steps", c.grid.n_steps}}},
         {"scheme", to_string(c.scheme)},
         {"dim", c.dim},
         {"x0", initial_state(c)},
         {"drift", drift_to_json(c.drift)},
         {"test_function",
          {{"kind", c.test_function.kind},
           {"alpha", c.test_function.alpha},
           {"amplitude", c.test_function.amplitude},
           {"frequency", c.test_function.frequency},
           {"phase", c.test_function.phase},
           {"radius", c.test_function.radius},
           {"center", c.test_function.center},
           {"value", c.test_function.value}}},
         {"sweep",
          {{"t", c.sweep.t},
           {"m", c.sweep.m},
           {"h_grid", c.sweep.h_grid},
           {"pe_eps", c.sweep.pe_eps},
           {"eps_grid", c.sweep.eps_grid},
           {"ae_h", c.sweep.ae_h},
           {"coupled", c.sweep.coupled},
           {"A", c.sweep.A ? Json(*c.sweep.A) : Json(nullptr)}}},
         {"density",
          {{"t", c.density.t},
           {"method", c.density.method},
           {"resolution", c.density.resolution},
           {"m", c.density.m},
           {"n_lags", c.density.n_lags},
           {"chunk_paths", c.density.chunk_paths}}},
         {"conditions", {{"t", c.conditions_t}}},
         {"output_dir", c.output_dir},
         {"emit", {{"json", c.emit.json}, {"csv", c.emit.csv}, {"binary", c.emit.binary}}}};
  if (!c.command.empty()) j["command"] = c.command;
  if (c.path_dependent) {
    const auto& pd = *c.path_dependent;
    j["path_dependent"] = Json{{"memory", drift_to_json(pd.memory)},
                               {"weight", pd.weight},
                               {"v_kind", pd.v_kind},
                               {"delta", pd.delta ? Json(*pd.delta) : Json(nullptr)}};
  }
  return j;
}

Json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("config", file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                        ": JSON syntax error");
  }
}

Json apply_overrides(Json config, const RunOptions& opts) {
  if (!config.is_object()) throw ValidationError("config", "expected a JSON object");
  if (opts.seed) config["seed"] = *opts.seed;
  if (opts.output_dir) config["output_dir"] = *opts.output_dir;
  return config;
}

Json strip_timings(Json report) {
  report.erase("timings");
  if (report.contains("results") && report["results"].is_object() && report["results"].contains("report") &&
      report["results"]["report"].is_object())
    report["results"]["report"].erase("timings");
  return report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e) || dynamic_cast<const UnsupportedSchemeError*>(&e))
    return 2;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const InsufficientDataError*>(&e)) return 3;
  return 1;
}

// ---------------------------------------------------------------------------
// Subcommands.

Json cmd_check_conditions(const ExperimentConfig& c) {
  const KernelSpec spec = c.kernel.build(c.grid.T);
  const double t = c.conditions_t;
  const double expected = spec.regularity_index();
  const ConditionFit cc1 = fit_condition_cc1(spec, t, default_cc1_grid(spec, t));
  const ConditionFit cc2 = fit_condition_cc2(spec, default_cc2_pairs(spec, t));
  auto ci = [](const ConditionFit& f) {
    const double hw = 1.959963984540054 * f.slope_se / 2.0;
    return Json::array({f.exponent_estimate - hw, f.exponent_estimate + hw});
  };
  Json r{{"kernel", spec},
         {"t", t},
         {"cc1", cc1},
         {"A_estimate", cc1.exponent_estimate},
         {"A_ci", ci(cc1)},
         {"A_expected", expected},
         {"cc2", cc2},
         {"H_estimate", cc2.exponent_estimate},
         {"H_ci", ci(cc2)},
         {"H_expected", expected},
         {"source", spec.family() == KernelFamily::FbmGeneral || spec.family() == KernelFamily::FbmSimple
                        ? "quadrature of the kernel square"
                        : "closed form"}};
  if (spec.family() == KernelFamily::FbmSimple) r["lower_bound_constant"] = spec.lower_bound_constant();

  const std::size_t it = c.grid.node_index(t);
  if (c.n_paths >= 2 && it < 100) {
    r["cc2_monte_carlo"] = Json{{"skipped", "fewer than 100 steps up to t; the increment fit needs two decades of gaps"}};
  } else if (c.n_paths >= 2) {
    const auto noise = sample_noise(c, spec, c.n_paths, 0);
    std::set<std::size_t> ks;
    const double top = it >= 200 ? std::floor(it / 2.0) : static_cast<double>(it);
    for (double k : logspace(1.0, top, 12)) ks.insert(static_cast<std::size_t>(std::round(k)));
    std::vector<double> gaps, vars;
    Json rows = Json::array();
    for (std::size_t k : ks) {
      if (k > it) continue;
      std::vector<double> sq(c.n_paths * c.dim);
      for (std::size_t p = 0; p < c.n_paths; ++p)
        for (std::size_t d = 0; d < c.dim; ++d) {
          const double inc = noise->value(p, it, d) - noise->value(p, it - k, d);
          sq[p * c.dim + d] = inc * inc;
        }
      const MeanSE m = mean_se(sq);
      const double gap = static_cast<double>(k) * c.grid.dt();
      gaps.push_back(gap);
      vars.push_back(m.mean);
      rows.push_back(Json{{"gap", gap}, {"estimate", m.mean}, {"std_error", m.std_error},
                          {"closed_form", increment_variance(spec, t, t - gap)}});
    }
    const ConditionFit mc = fit_increment_exponent(gaps, vars);
    r["cc2_monte_carlo"] = Json{{"fit", mc}, {"H_estimate", mc.exponent_estimate}, {"rows", rows},
                                {"n_paths", c.n_paths}, {"scheme", to_string(c.scheme)}};
  }
  if (writes_files(c) && c.emit.csv) {
    std::ofstream out(out_path(c, "conditions.csv"));
    out.precision(17);
    out << "condition,abscissa,value\n";
    for (const auto& [x, v] : cc1.grid) out << "cc1," << x << ',' << v << '\n';
    for (const auto& [x, v] : cc2.grid) out << "cc2," << x << ',' << v << '\n';
  }
  return r;
}

Json cmd_simulate(const ExperimentConfig& c) {
  const KernelSpec spec = c.kernel.build(c.grid.T);
  const auto noise = sample_noise(c, spec, c.n_paths, 0);
  const std::size_t n = c.grid.n_steps;
  Json r{{"kernel", spec}, {"n_paths", c.n_paths}, {"scheme", to_string(c.scheme)}};
  if (c.n_paths >= 2) {
    std::vector<double> last(c.n_paths * c.dim);
    for (std::size_t p = 0; p < c.n_paths; ++p)
      for (std::size_t d = 0; d < c.dim; ++d) last[p * c.dim + d] = noise->value(p, n, d);
    std::vector<double> sq(last.size());
    for (std::size_t i = 0; i < last.size(); ++i) sq[i] = last[i] * last[i];
    r["terminal_second_moment"] = mean_se(sq);
    r["terminal_variance_theory"] = covariance(spec, c.grid.T, c.grid.T);
    std::vector<std::pair<std::size_t, std::size_t>> probes;
    for (auto [a, b] : {std::pair{n / 4, n / 4}, {n / 2, n / 4}, {n, n / 2}, {n, n}, {n, std::size_t{1}}})
      if (a >= 1 && b >= 1) probes.emplace_back(a, b);
    const auto est = empirical_covariance(*noise, probes);
    Json rows = Json::array();
    for (std::size_t q = 0; q < probes.size(); ++q)
      rows.push_back(Json{{"t_i", c.grid.node(probes[q].first)},
                          {"t_j", c.grid.node(probes[q].second)},
                          {"estimate", est[q].estimate},
                          {"std_error", est[q].std_error},
                          {"theory", covariance(spec, c.grid.node(probes[q].first), c.grid.node(probes[q].second))}});
    r["covariance_probes"] = rows;
  }
  if (writes_files(c)) {
    if (c.emit.binary) {
      write_ensemble(out_path(c, "noise.bin"), *noise);
      write_sidecar(out_path(c, "noise.bin"), *noise);
    }
    if (c.emit.csv) {
      std::ofstream out(out_path(c, "noise_paths.csv"));
      write_paths_csv(out, c.grid, c.dim, noise->values(), c.n_paths, first_indices(paths_to_export(c.n_paths)));
    }
  }
  return r;
}

Json cmd_solve(const ExperimentConfig& c) {
  const Model m = build_model(c);
  const auto noise = sample_noise(c, m.kernel, c.n_paths, 0);
  const SolutionEnsemble sol = solve_model(c, m, noise);
  Json r{{"kernel", m.kernel}, {"n_paths", c.n_paths}, {"x0", sol.x0()}};
  if (m.drift) r["drift"] = *m.drift;
  if (m.path_drift) {
    r["path_dependent_drift"] = *m.path_drift;
    r["v_process"] = *m.v_spec;
  }
  if (c.n_paths >= 1) {
    const std::vector<double> xt = sol.values_at(c.grid.n_steps);
    Json comps = Json::array();
    for (std::size_t d = 0; d < c.dim; ++d) {
      std::vector<double> col(c.n_paths);
      for (std::size_t p = 0; p < c.n_paths; ++p) col[p] = xt[p * c.dim + d];
      Json entry{{"mean", mean_se(col)}};
      if (c.n_paths >= 2) entry["variance"] = sample_variance(col);
      comps.push_back(entry);
    }
    r["terminal"] = comps;
    r["drift_envelope_excess"] = drift_envelope_excess(sol);
  }
  if (writes_files(c)) {
    if (c.emit.binary) {
      write_ensemble(out_path(c, "solution.bin"), sol);
      write_sidecar(out_path(c, "solution.bin"), sol);
    }
    if (c.emit.csv) {
      std::ofstream out(out_path(c, "solution_paths.csv"));
      write_paths_csv(out, c.grid, c.dim, sol.values(), c.n_paths, first_indices(paths_to_export(c.n_paths)));
    }
  }
  return r;
}

SmoothingReport pe_ae_sweep(const SolutionEnsemble& sol, const TestFunctionSpec& phi, const SweepConfig& sweep,
                            double A, double beta, double H, std::optional<double> delta) {
  const TheoremExponents ex = theorem_exponents(A, beta, H, delta, sweep.m, phi.alpha());
  const double ae_exp = delta ? *ex.ae_exponent_t2 : ex.ae_exponent;
  const double rule = delta ? *ex.eps_rule_exponent_t2 : ex.eps_rule_exponent;
  const std::size_t d = sol.dim();
  const int m = sweep.m;
  auto direction = [d](double h) {
    std::vector<double> v(d, 0.0);
    v[0] = h;
    return v;
  };
  auto fit_or_none = [](const std::vector<SweepRow>& rows, bool in_h) -> std::optional<ScalingFit> {
    std::vector<ScalingPoint> pts;
    for (const auto& r : rows) pts.push_back({in_h ? r.h : r.eps, r.estimate, r.std_error});
    try {
      return scaling_regression(pts);
    } catch (const InsufficientDataError&) {
      return std::nullopt;
    }
  };

  SmoothingReport rep;
  rep.m = m;
  rep.h_grid = sweep.h_grid;
  rep.eps_grid = sweep.eps_grid;
  for (double h : sweep.h_grid) {
    const auto hv = direction(h);
    const MeanSE e = estimate_pe(sol, sweep.t, sweep.pe_eps, phi, hv, m);
    rep.pe_rows.push_back({h, sweep.pe_eps, m, e.mean, e.std_error,
                           phi.sup_norm() * std::pow(h / std::pow(sweep.pe_eps, A), m)});
  }
  rep.pe_slope_in_h = fit_or_none(rep.pe_rows, true);
  if (rep.pe_slope_in_h && !rep.pe_slope_in_h->used.empty()) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i : rep.pe_slope_in_h->used) {
      const double ratio = std::abs(rep.pe_rows[i].estimate) / rep.pe_rows[i].bound_value;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    rep.pe_ratio_spread = hi / lo;
  }
  const auto ah = direction(sweep.ae_h);
  for (double eps : sweep.eps_grid) {
    const MeanSE e = estimate_ae(sol, sweep.t, eps, phi, ah, m);
    rep.ae_rows.push_back({sweep.ae_h, eps, m, e.mean, e.std_error, phi.holder_norm() * std::pow(eps, ae_exp)});
  }
  rep.ae_slope_in_eps = fit_or_none(rep.ae_rows, false);

  std::ostringstream formula;
  formula.precision(6);
  formula << "eps = h^(m/(alpha*(" << (delta ? "mu" : "beta*H") << "+1)+A*m)) = h^" << rule;
  rep.chosen_eps_rule = {rule, formula.str()};
  if (sweep.coupled) {
    const TimeGrid& g = sol.grid();
    const std::size_t nt = g.node_index(sweep.t);
    for (double h : sweep.h_grid) {
      const double raw = std::pow(h, rule);
      const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(raw / g.dt())), 1, nt);
      const double eps = static_cast<double>(k) * g.dt();
      const auto hv = direction(h);
      const MeanSE e = estimate_difference_mean(sol, sweep.t, phi, hv, m);
      rep.coupled_rows.push_back({h, eps, m, e.mean, e.std_error,
                                  phi.sup_norm() * std::pow(h / std::pow(eps, A), m) +
                                      phi.holder_norm() * std::pow(eps, ae_exp)});
    }
    rep.coupled_slope_in_h = fit_or_none(rep.coupled_rows, true);
  }
  return rep;
}

Json cmd_pe_ae_sweep(const ExperimentConfig& c) {
  const Model m = build_model(c);
  const TestFunctionSpec phi = c.test_function.build(c.dim);
  const auto noise = sample_noise(c, m.kernel, c.n_paths, 0);
  const SolutionEnsemble sol = solve_model(c, m, noise);
  const double H = m.kernel.hurst();
  const double A = c.sweep.A.value_or(m.kernel.regularity_index());
  const auto delta = model_delta(m);
  const SmoothingReport rep = pe_ae_sweep(sol, phi, c.sweep, A, m.beta, H, delta);
  const TheoremExponents ex = theorem_exponents(A, m.beta, H, delta, c.sweep.m, phi.alpha());
  const double ae_target = delta ? *ex.ae_exponent_t2 : ex.ae_exponent;
  const double s_target = delta ? *ex.s_t2 : ex.s;
  Json checks{{"pe_slope_target", c.sweep.m},
              {"pe_slope_within_0.1", rep.pe_slope_in_h ? Json(std::abs(rep.pe_slope_in_h->slope - c.sweep.m) <= 0.1)
                                                        : Json(nullptr)},
              {"ae_slope_target", ae_target},
              {"ae_slope_at_least_target_minus_0.1",
               rep.ae_slope_in_eps ? Json(rep.ae_slope_in_eps->slope >= ae_target - 0.1) : Json(nullptr)},
              {"coupled_slope_target", s_target},
              {"coupled_slope_at_least_target_minus_0.1",
               rep.coupled_slope_in_h ? Json(rep.coupled_slope_in_h->slope >= s_target - 0.1) : Json(nullptr)}};
  if (writes_files(c) && c.emit.csv) {
    write_rows_csv(out_path(c, "pe_sweep.csv"), rep.pe_rows);
    write_rows_csv(out_path(c, "ae_sweep.csv"), rep.ae_rows);
    if (!rep.coupled_rows.empty()) write_rows_csv(out_path(c, "coupled_sweep.csv"), rep.coupled_rows);
  }
  return Json{{"A", A},           {"beta", m.beta},    {"H", H},          {"delta", delta ? Json(*delta) : Json(nullptr)},
              {"test_function", phi}, {"exponents", ex}, {"smoothing", rep}, {"checks", checks}};
}

std::vector<double> terminal_samples(const ExperimentConfig& c, double t) {
  if (c.dim != 1) throw ValidationError("dim", "density estimation supports dim = 1 only");
  const Model m = build_model(c);
  const std::size_t node = c.grid.node_index(t);
  std::vector<double> out;
  out.reserve(c.n_paths);
  for (std::size_t first = 0; first < c.n_paths; first += c.density.chunk_paths) {
    const std::size_t n = std::min(c.density.chunk_paths, c.n_paths - first);
    const SolutionEnsemble sol = solve_model(c, m, sample_noise(c, m.kernel, n, first));
    const std::vector<double> x = sol.values_at(node);
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

Json cmd_density_verify(const ExperimentConfig& c) {
  const Model m = build_model(c);
  const std::vector<double> samples = terminal_samples(c, c.density.t);
  const DensityEstimate f =
      estimate_density(samples, density_method_from_string(c.density.method), c.density.resolution);
  const std::vector<double> lags = default_lag_grid(f, c.density.n_lags);
  const double H = m.kernel.hurst();
  const double A = c.sweep.A.value_or(m.kernel.regularity_index());
  const auto delta = model_delta(m);
  const TheoremExponents ex = theorem_exponents(A, m.beta, H, delta);
  const double eta = delta ? *ex.eta_t2 : ex.eta_t1;
  const BesovReport rep = besov_report(f, c.density.m, lags, eta);
  const Verdict v = compare_to_theorem(rep, A, m.beta, H, delta);
  const MeanSE mean = mean_se(samples);
  if (writes_files(c) && c.emit.csv) {
    std::ofstream lp(out_path(c, "lag_profile.csv"));
    write_lag_profile_csv(lp, rep);
    std::ofstream dens(out_path(c, "density.csv"));
    dens.precision(17);
    dens << "x,density\n";
    for (std::size_t i = 0; i < f.size(); ++i) dens << f.x(i) << ',' << f.values[i] << '\n';
  }
  return Json{{"A", A},
              {"beta", m.beta},
              {"H", H},
              {"delta", delta ? Json(*delta) : Json(nullptr)},
              {"t", c.density.t},
              {"exponents", ex},
              {"density",
               {{"method", to_string(f.method)},
                {"n_samples", f.n_samples},
                {"cells", f.size()},
                {"bandwidth_or_binwidth", f.bandwidth_or_binwidth},
                {"sample_mean", mean},
                {"sample_variance", sample_variance(samples)}}},
              {"besov", rep},
              {"verdict", v}};
}

Json run_command(const std::string& command, const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Json results;
  if (command == "check-conditions")
    results = cmd_check_conditions(config);
  else if (command == "simulate")
    results = cmd_simulate(config);
  else if (command == "solve")
    results = cmd_solve(config);
  else if (command == "pe-ae-sweep")
    results = cmd_pe_ae_sweep(config);
  else if (command == "density-verify")
    results = cmd_density_verify(config);
  else
    throw ValidationError("command", "unknown command '" + command + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json cfg = config_to_json(config);
  cfg["command"] = command;
  Json report{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"config", cfg},
              {"results", results},
              {"timings", {{"wall_seconds", wall}, {"threads", num_threads()}}}};
  if (writes_files(config) && config.emit.json) {
    std::ofstream out(out_path(config, "report.json"));
    out << report.dump(2) << '\n';
  }
  return report;
}

Json run_reproduce(const Json& document, const RunOptions& opts) {
  const bool is_report = document.is_object() && document.contains("tool") && document.contains("config") &&
                         document.contains("results");
  const Json raw = is_report ? document.at("config") : document;
  if (!raw.is_object()) throw ValidationError("config", "expected a JSON object");
  const ExperimentConfig c = parse_config(apply_overrides(raw, opts));
  std::string command = c.command;
  if (is_report && document.contains("command") && document.at("command").is_string())
    command = document.at("command").get<std::string>();
  if (command.empty()) throw ValidationError("command", "missing required field");
  if (command == "reproduce") throw ValidationError("command", "a reproduce config cannot reproduce itself");
  Json fresh = run_command(command, c);
  Json repro{{"source", is_report ? "report" : "config"}};
  if (is_report) repro["identical"] = strip_timings(fresh)["results"] == document.at("results");
  fresh["reproduction"] = repro;
  return fresh;
}

}  // namespace vlab
