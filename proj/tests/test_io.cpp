#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "vlab/ensemble_io.hpp"
#include "vlab/errors.hpp"
#include "vlab/serialization.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vlab_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Io, NoiseRoundTrip) {
  const PathEnsemble e = kernel_discretized_sample(KernelSpec::fbm_general(0.3), TimeGrid(1.0, 16), 2, 7, 42, 3);
  const fs::path f = scratch("noise.bin");
  write_ensemble(f, e);
  const EnsembleFile r = read_ensemble(f);
  EXPECT_EQ(r.header.seed, 42u);
  EXPECT_EQ(r.header.n_paths, 7u);
  EXPECT_EQ(r.header.n_nodes, 17u);
  EXPECT_EQ(r.header.dim, 2u);
  EXPECT_EQ(r.header.first_path, 3u);
  EXPECT_EQ(r.header.scheme, Scheme::KernelDiscretized);
  EXPECT_EQ(r.header.kind, EnsembleKind::Noise);
  EXPECT_EQ(r.values, e.values());
}

TEST(Io, SolutionRoundTripAndSidecar) {
  auto b = std::make_shared<const PathEnsemble>(exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 8), 1, 4, 1));
  const SolutionEnsemble x = euler_solve(DriftSpec::holder_power(1, 0.5, 1.0, 1.0), b, {0.5});
  const fs::path f = scratch("solution.bin");
  write_ensemble(f, x);
  write_sidecar(f, x);
  const EnsembleFile r = read_ensemble(f);
  EXPECT_EQ(r.header.kind, EnsembleKind::Solution);
  EXPECT_EQ(r.values, x.values());
  std::ifstream in(scratch("solution.json"));
  const Json meta = Json::parse(in);
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 1u);
  EXPECT_TRUE(meta.contains("drift"));
}

TEST(Io, RejectsBadFiles) {
  const fs::path f = scratch("bad.bin");
  {
    std::ofstream out(f, std::ios::binary);
    out << "not an ensemble";
  }
  EXPECT_THROW(read_ensemble(f), ValidationError);
  EXPECT_THROW(read_ensemble(scratch("missing.bin")), Error);
}

TEST(Io, RejectsOversizedHeader) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 4), 1, 2, 1);
  const fs::path f = scratch("huge.bin");
  write_ensemble(f, e);
  // Patch n_paths (offset: magic 8, version 4, scheme 4, seed 8).
  std::fstream io(f, std::ios::binary | std::ios::in | std::ios::out);
  io.seekp(24);
  const std::uint64_t n = 1ull << 40;
  io.write(reinterpret_cast<const char*>(&n), sizeof n);
  io.close();
  EXPECT_THROW(read_ensemble(f), ValidationError);
}

TEST(Io, TruncatedBody) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 4), 1, 20, 1);
  const fs::path f = scratch("trunc.bin");
  write_ensemble(f, e);
  fs::resize_file(f, fs::file_size(f) - 8);
  EXPECT_THROW(read_ensemble(f), ValidationError);
}

TEST(Io, PathsCsv) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 2), 2, 3, 1);
  std::ostringstream out;
  write_paths_csv(out, e.grid(), 2, e.values(), 3, {0, 2});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,p0_c0,p0_c1,p2_c0,p2_c1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Io, JsonRecords) {
  Json j = KernelSpec::fbm_simple(0.7);
  EXPECT_EQ(j.at("family"), "FbmSimple");
  EXPECT_NEAR(j.at("hurst").get<double>(), 0.7, 1e-15);
  Json m = MeanSE{1.5, 0.25};
  EXPECT_EQ(m.at("estimate").get<double>(), 1.5);
  EXPECT_EQ(m.at("std_error").get<double>(), 0.25);
}
