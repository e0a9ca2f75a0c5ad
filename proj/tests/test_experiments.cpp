#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "vlab/errors.hpp"
#include "vlab/experiments.hpp"
#include "vlab/parallel.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

const Json kSweep = Json::parse(R"({
  "command": "pe-ae-sweep", "seed": 11, "n_paths": 2000,
  "kernel": {"family": "FbmGeneral", "hurst": 0.7}, "grid": {"T": 1, "n_steps": 64},
  "drift": {"kind": "HolderPower", "beta": 0.5, "coefficient": 1, "bound": 1},
  "test_function": {"kind": "Cosine", "alpha": 0.9, "phase": 0.3},
  "sweep": {"t": 1, "m": 2}
})");

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vlab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VLAB_CLI_PATH) + " " + args + " > " + scratch("stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string field_of(const Json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, MissingFieldsAreNamed) {
  for (const char* key : {"seed", "n_paths", "kernel"}) {
    Json j = kSweep;
    j.erase(key);
    EXPECT_EQ(field_of(j), key);
  }
  Json j = kSweep;
  j["kernel"]["hurst"] = 1.5;
  EXPECT_EQ(field_of(j), "kernel.hurst");
  j = kSweep;
  j["drift"]["colour"] = 1;
  EXPECT_EQ(field_of(j), "drift.colour");
  j = kSweep;
  j["dim"] = 5;
  EXPECT_EQ(field_of(j), "dim");
}

TEST(Config, NormalizedRoundTrip) {
  const ExperimentConfig c = parse_config(kSweep);
  const Json once = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(once)), once);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  const fs::path p = write_file("broken.json", "{\n  \"seed\": 1,\n  \"n_paths\" 3\n}\n");
  try {
    load_json_file(p);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Config, Overrides) {
  RunOptions o;
  o.seed = 99;
  o.output_dir = "/tmp/x";
  const Json j = apply_overrides(kSweep, o);
  EXPECT_EQ(j.at("seed"), 99);
  EXPECT_EQ(j.at("output_dir"), "/tmp/x");
}

TEST(Commands, CheckConditionsFbm) {
  Json j = kSweep;
  j["command"] = "check-conditions";
  j["n_paths"] = 0;
  const Json r = run_command("check-conditions", parse_config(j));
  EXPECT_NEAR(r["results"]["cc1"]["exponent_estimate"].get<double>(), 0.7, 0.02);
  EXPECT_NEAR(r["results"]["cc2"]["exponent_estimate"].get<double>(), 0.7, 1e-9);
}

TEST(Commands, SweepZeroDriftHasZeroAe) {
  Json j = kSweep;
  j["drift"] = {{"kind", "Zero"}};
  const Json r = run_command("pe-ae-sweep", parse_config(j));
  for (const Json& row : r["results"]["smoothing"]["ae_rows"]) EXPECT_EQ(row["estimate"].get<double>(), 0.0);
}

TEST(Commands, ThreadCountDoesNotChangeResults) {
  const ExperimentConfig c = parse_config(kSweep);
  set_num_threads(1);
  const Json a = strip_timings(run_command("pe-ae-sweep", c));
  set_num_threads(8);
  const Json b = strip_timings(run_command("pe-ae-sweep", c));
  set_num_threads(0);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Commands, ReproduceReport) {
  const Json report = run_command("pe-ae-sweep", parse_config(kSweep));
  const Json again = run_reproduce(report, {});
  EXPECT_TRUE(again["reproduction"]["identical"].get<bool>());
  Json tampered = report;
  tampered["results"]["A"] = 0.1;
  EXPECT_FALSE(run_reproduce(tampered, {})["reproduction"]["identical"].get<bool>());
}

TEST(Commands, DensityNeedsOneDimension) {
  Json j = kSweep;
  j["dim"] = 2;
  j["x0"] = {0.0, 0.0};
  EXPECT_THROW(run_command("density-verify", parse_config(j)), Error);
}

TEST(Commands, ExitCodes) {
  EXPECT_EQ(exit_code_for(ValidationError("seed", "missing")), 2);
  EXPECT_EQ(exit_code_for(DomainError("x")), 2);
  EXPECT_EQ(exit_code_for(NumericError("x", 1e-3)), 3);
  EXPECT_EQ(exit_code_for(InsufficientDataError("x")), 3);
}

TEST(Cli, SubcommandsAndExitCodes) {
  Json sim = kSweep;
  sim.erase("command");
  sim["n_paths"] = 50;
  const fs::path good = write_file("sim.json", sim.dump());
  const fs::path out = scratch("sim_out");
  EXPECT_EQ(run_cli("simulate --config " + good.string() + " --out " + out.string() + " --threads 2"), 0);
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "noise_paths.csv"));
  EXPECT_EQ(run_cli("solve --config " + good.string() + " --seed 3"), 0);
  EXPECT_EQ(run_cli("reproduce --config " + (out / "report.json").string()), 0);

  Json bad = sim;
  bad.erase("seed");
  EXPECT_EQ(run_cli("simulate --config " + write_file("bad.json", bad.dump()).string()), 2);
  EXPECT_EQ(run_cli("simulate --config " + write_file("syntax.json", "{\"seed\": }").string()), 2);
  EXPECT_EQ(run_cli("simulate"), 2);
}
