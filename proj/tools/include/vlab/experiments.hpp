#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vlab/besov.hpp"
#include "vlab/drift.hpp"
#include "vlab/kernels.hpp"
#include "vlab/paths.hpp"
#include "vlab/serialization.hpp"
#include "vlab/smoothing.hpp"

namespace vlab {

inline constexpr const char* kToolName = "vlab";
inline constexpr const char* kToolVersion = "0.1.0";

struct KernelConfig {
  std::string family = "Brownian";
  double hurst = 0.5;
  double decay = 1.0;
  KernelSpec build(double horizon) const;
};

struct DriftConfig {
  std::string kind = "Zero";  // Zero | Constant | HolderPower | TimeModulatedHolder | Weierstrass
  double beta = 1.0;
  double coefficient = 1.0;
  double bound = 1.0;
  double gamma = 1.0;
  std::size_t terms = 14;
  std::vector<double> center;
  std::vector<double> value;
  DriftSpec build(std::size_t dim) const;
};

struct PathDependentConfig {
  DriftConfig memory;
  double weight = 1.0;
  std::string v_kind = "DrivingWiener";
  std::optional<double> delta;  // declared δ; defaults to the value implied by the kind
};

struct TestFunctionConfig {
  std::string kind = "Cosine";
  double alpha = 0.9;
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.3;
  double radius = 1.0;
  std::vector<double> center;
  double value = 1.0;
  TestFunctionSpec build(std::size_t dim) const;
};

struct SweepConfig {
  double t = 1.0;
  int m = 1;
  std::vector<double> h_grid;
  double pe_eps = 0.25;
  std::vector<double> eps_grid;
  double ae_h = 0.25;
  bool coupled = true;
  std::optional<double> A;  // overrides the kernel's regularity index
};

struct DensityConfig {
  double t = 1.0;
  std::string method = "Histogram";
  double resolution = kDefaultBins;
  int m = 2;
  std::size_t n_lags = 16;
  std::size_t chunk_paths = 100000;
};

struct EmitConfig {
  bool json = true;
  bool csv = true;
  bool binary = false;
};

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  KernelConfig kernel;
  TimeGrid grid{1.0, 64};
  Scheme scheme = Scheme::KernelDiscretized;
  std::size_t dim = 1;
  std::vector<double> x0;
  DriftConfig drift;
  std::optional<PathDependentConfig> path_dependent;
  TestFunctionConfig test_function;
  SweepConfig sweep;
  DensityConfig density;
  double conditions_t = 1.0;
  std::string output_dir;
  EmitConfig emit;
};

/// Parses and validates a config; ValidationError names the offending field path.
ExperimentConfig parse_config(const Json& j);
/// Reads a config file; JSON syntax errors are reported with line and column.
Json load_json_file(const std::filesystem::path& file);
/// Normalized config with every default filled in; parse_config(config_to_json(c)) == c.
Json config_to_json(const ExperimentConfig& c);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::size_t threads = 0;  // 0 keeps the current setting
};

/// Applies CLI overrides to a raw config document.
Json apply_overrides(Json config, const RunOptions& opts);

/// Runs one subcommand and returns {"tool","command","config","results","timings"}.
/// Files (CSV, binary, report.json) are written when output_dir is set.
Json run_command(const std::string& command, const ExperimentConfig& config);

/// Re-runs the config embedded in a report (or a config carrying "command") and, for reports,
/// compares the fresh results with the stored ones.
Json run_reproduce(const Json& document, const RunOptions& opts);

/// Report without its "timings" member, for determinism comparisons.
Json strip_timings(Json report);

Json cmd_check_conditions(const ExperimentConfig& c);
Json cmd_simulate(const ExperimentConfig& c);
Json cmd_solve(const ExperimentConfig& c);
Json cmd_pe_ae_sweep(const ExperimentConfig& c);
Json cmd_density_verify(const ExperimentConfig& c);

/// Pe/Ae sweep used by cmd_pe_ae_sweep; exposed for the acceptance suite.
SmoothingReport pe_ae_sweep(const SolutionEnsemble& solution, const TestFunctionSpec& phi, const SweepConfig& sweep,
                            double A, double beta, double H, std::optional<double> delta);

/// Samples X_t for a d = 1 configuration in chunks of chunk_paths paths; identical to an
/// unchunked run because path streams depend only on (seed, path index).
std::vector<double> terminal_samples(const ExperimentConfig& c, double t);

/// Exit code for an exception thrown by a subcommand: 2 validation/domain, 3 numeric.
int exit_code_for(const std::exception& e);

}  // namespace vlab
