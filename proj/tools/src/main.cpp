#include <CLI11.hpp>
#include <iostream>

#include "vlab/errors.hpp"
#include "vlab/experiments.hpp"
#include "vlab/parallel.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Path to the JSON config")->required();
  sub->add_option("--seed", f.seed, "Override the config seed");
  sub->add_option("--out", f.out, "Output directory for reports and CSV files");
  sub->add_option("--threads", f.threads, "Worker threads (default: hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and quadrature experiments for Volterra-driven SDEs"};
  app.set_version_flag("--version", std::string(vlab::kToolVersion));
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"check-conditions", "Fit the small-window and increment exponents of the noise kernel"},
      {"simulate", "Sample a noise ensemble"},
      {"solve", "Solve the SDE by the Euler scheme"},
      {"pe-ae-sweep", "Monte Carlo sweeps of the probabilistic estimate and approximation error"},
      {"density-verify", "Estimate the density of X_t and its Besov regularity"},
      {"reproduce", "Re-run a config or the config embedded in a report"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (flags.threads > 0) vlab::set_num_threads(flags.threads);
    vlab::RunOptions opts{flags.seed, flags.out, flags.threads};
    const vlab::Json doc = vlab::load_json_file(flags.config);
    vlab::Json report;
    if (command == "reproduce") {
      report = vlab::run_reproduce(doc, opts);
    } else {
      const vlab::ExperimentConfig cfg = vlab::parse_config(vlab::apply_overrides(doc, opts));
      report = vlab::run_command(command, cfg);
    }
    std::cout << report.dump(2) << '\n';
    if (report.contains("reproduction") && report["reproduction"].value("identical", true) == false) {
      std::cerr << "vlab: reproduced results differ from the stored report\n";
      return 3;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "vlab " << command << ": " << e.what() << '\n';
    return vlab::exit_code_for(e);
  }
}
