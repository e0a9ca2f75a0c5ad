#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vlab/besov.hpp"
#include "vlab/kernels.hpp"
#include "vlab/paths.hpp"
#include "vlab/rng.hpp"
#include "vlab/smoothing.hpp"

using namespace vlab;

static void BM_Philox(benchmark::State& state) {
  std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(philox4x32(ctr, {7, 9}));
    ++ctr[0];
  }
}
BENCHMARK(BM_Philox);

static void BM_FillNormals(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  std::uint64_t path = 0;
  for (auto _ : state) {
    fill_normals({1, path++, 0}, 0, out.data(), out.size());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillNormals)->Arg(256)->Arg(4096);

static void BM_KernelEval(benchmark::State& state) {
  const KernelSpec k = state.range(0) == 0 ? KernelSpec::fbm_general(0.3) : KernelSpec::fbm_simple(0.7);
  double s = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_kernel(k, 1.0, s));
    s = s < 0.98 ? s + 0.013 : 0.01;
  }
}
BENCHMARK(BM_KernelEval)->Arg(0)->Arg(1);

static void BM_CovarianceByQuadrature(benchmark::State& state) {
  const KernelSpec k = KernelSpec::fbm_general(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_by_quadrature(k, 0.9, 0.4));
}
BENCHMARK(BM_CovarianceByQuadrature);

static void BM_DiscretizedSample(benchmark::State& state) {
  const KernelSpec k = KernelSpec::fbm_general(0.7);
  const TimeGrid g(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const PathEnsemble e = kernel_discretized_sample(k, g, 1, 1000, 3);
    benchmark::DoNotOptimize(e.values().data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_DiscretizedSample)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ExactSample(benchmark::State& state) {
  const KernelSpec k = KernelSpec::fbm_general(0.7);
  const TimeGrid g(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const PathEnsemble e = exact_sample(k, g, 1, 1000, 3);
    benchmark::DoNotOptimize(e.values().data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ExactSample)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GaussianDifferenceL1(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_difference_l1(1.0, 0.05, m));
}
BENCHMARK(BM_GaussianDifferenceL1)->Arg(1)->Arg(4);

static void BM_LagProfile(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  std::vector<double> x(200000);
  for (double& v : x) v = z(gen);
  const DensityEstimate f = estimate_density(x, DensityMethod::Histogram, 200);
  const auto h = default_lag_grid(f);
  for (auto _ : state) benchmark::DoNotOptimize(besov_lag_profile(f, 2, h));
}
BENCHMARK(BM_LagProfile);
BENCHMARK_MAIN();
