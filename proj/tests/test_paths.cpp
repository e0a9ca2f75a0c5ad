#include <gtest/gtest.h>

#include <cmath>

#include "vlab/errors.hpp"
#include "vlab/paths.hpp"
#include "vlab/stats.hpp"

using namespace vlab;

TEST(Paths, GridNodes) {
  const TimeGrid g(1.0, 64);
  EXPECT_EQ(g.n_nodes(), 65u);
  EXPECT_EQ(g.node_index(0.5), 32u);
  EXPECT_EQ(g.steps_in(0.25), 16u);
  EXPECT_THROW(g.node_index(0.3), DomainError);
  EXPECT_THROW(TimeGrid(1.0, 0), DomainError);
}

TEST(Paths, BrownianDiscretizationIsRunningSum) {
  const TimeGrid g(1.0, 16);
  const PathEnsemble e = kernel_discretized_sample(KernelSpec::brownian(), g, 2, 5, 11);
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t c = 0; c < 2; ++c) {
      double acc = 0.0;
      EXPECT_EQ(e.value(p, 0, c), 0.0);
      for (std::size_t i = 1; i < g.n_nodes(); ++i) {
        acc += e.increment(p, i - 1, c);
        EXPECT_NEAR(e.value(p, i, c), acc, 1e-13);
      }
    }
}

TEST(Paths, EmptyEnsemble) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 8), 1, 0, 1);
  EXPECT_EQ(e.n_paths(), 0u);
  EXPECT_TRUE(e.values().empty());
}

TEST(Paths, ChunkedSamplingMatchesSingleRun) {
  const KernelSpec k = KernelSpec::fbm_general(0.7);
  const TimeGrid g(1.0, 32);
  for (Scheme s : {Scheme::Exact, Scheme::KernelDiscretized}) {
    auto sample = [&](std::size_t n, std::size_t first) {
      return s == Scheme::Exact ? exact_sample(k, g, 2, n, 99, first) : kernel_discretized_sample(k, g, 2, n, 99, first);
    };
    const PathEnsemble all = sample(10, 0), tail = sample(4, 6);
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t i = 0; i < g.n_nodes(); ++i) EXPECT_EQ(all.value(p + 6, i, 1), tail.value(p, i, 1));
  }
}

TEST(Paths, SeedsAndComponentsDiffer) {
  const TimeGrid g(1.0, 8);
  const PathEnsemble a = exact_sample(KernelSpec::brownian(), g, 2, 3, 1), b = exact_sample(KernelSpec::brownian(), g, 2, 3, 2);
  EXPECT_NE(a.value(0, 8, 0), b.value(0, 8, 0));
  EXPECT_NE(a.value(0, 8, 0), a.value(0, 8, 1));
}

TEST(Paths, ExactCovarianceBrownianAndFbm) {
  const TimeGrid g(1.0, 16);
  for (const KernelSpec& k : {KernelSpec::brownian(), KernelSpec::fbm_general(0.75)}) {
    const PathEnsemble e = exact_sample(k, g, 1, 20000, 5);
    const std::vector<std::pair<std::size_t, std::size_t>> probes{{16, 16}, {16, 8}, {4, 12}, {1, 1}};
    const auto est = empirical_covariance(e, probes);
    for (std::size_t q = 0; q < probes.size(); ++q) {
      const double r = covariance(k, g.node(probes[q].first), g.node(probes[q].second));
      EXPECT_LT(std::abs(est[q].estimate - r), 4 * est[q].std_error) << q;
    }
  }
}

TEST(Paths, DiscretizedFbmVarianceCloseToExact) {
  const KernelSpec k = KernelSpec::fbm_general(0.7);
  const TimeGrid g(1.0, 256);
  double v = 0.0;
  for (double w : discretization_row(k, g, 256)) v += w * w * g.dt();
  EXPECT_NEAR(v, 1.0, 0.05);
}

TEST(Paths, CovarianceFactorReproducesCovariance) {
  const KernelSpec k = KernelSpec::riemann_liouville(0.4);
  const TimeGrid g(1.0, 8);
  const CovarianceFactor f = covariance_factor(k, g);
  for (std::size_t i = 0; i < f.n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l <= j; ++l) s += f.lower[i * f.n + l] * f.lower[j * f.n + l];
      EXPECT_NEAR(s, covariance(k, g.node(i + 1), g.node(j + 1)) + (i == j ? f.jitter : 0.0), 1e-10);
    }
}

TEST(Paths, TailSplitBrownian) {
  const TimeGrid g(1.0, 32);
  const KernelSpec k = KernelSpec::brownian();
  const PathEnsemble e = kernel_discretized_sample(k, g, 1, 50, 3);
  const TailSplit s = tail_components(e, k, 1.0, 0.25);
  for (std::size_t p = 0; p < 50; ++p) {
    EXPECT_EQ(s.smooth[p], 0.0);
    EXPECT_NEAR(s.tail[p], e.value(p, 32, 0) - e.value(p, 24, 0), 1e-13);
  }
}

TEST(Paths, TailSplitSumsToIncrement) {
  const TimeGrid g(1.0, 32);
  const KernelSpec k = KernelSpec::fbm_simple(0.7);
  const PathEnsemble e = kernel_discretized_sample(k, g, 1, 20, 4);
  const TailSplit s = tail_components(e, k, 0.75, 0.25);
  for (std::size_t p = 0; p < 20; ++p)
    EXPECT_NEAR(s.smooth[p] + s.tail[p], e.value(p, 24, 0) - e.value(p, 16, 0), 1e-12);
}

TEST(Paths, TailWindowWholeInterval) {
  const TimeGrid g(1.0, 8);
  const KernelSpec k = KernelSpec::ornstein_uhlenbeck();
  const PathEnsemble e = kernel_discretized_sample(k, g, 1, 4, 6);
  const TailSplit s = tail_components(e, k, 0.5, 0.5);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_NEAR(s.tail[p], e.value(p, 4, 0), 1e-13);
  EXPECT_THROW(tail_components(e, k, 0.5, 0.75), DomainError);
}

TEST(Paths, TailVarianceMatchesDiscretization) {
  const TimeGrid g(1.0, 64);
  const KernelSpec k = KernelSpec::brownian();
  const PathEnsemble e = kernel_discretized_sample(k, g, 1, 20000, 8);
  const TailSplit s = tail_components(e, k, 1.0, 0.125);
  const double v = sample_variance(s.tail), se = v * std::sqrt(2.0 / (s.tail.size() - 1));
  EXPECT_LT(std::abs(v - tail_variance(k, 1.0, 0.125)), 4 * se);
}

TEST(Paths, CrossComponentsIndependent) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 4), 2, 20000, 9);
  const CovarianceEstimate c = cross_component_covariance(e, 4, 0, 1);
  EXPECT_LT(std::abs(c.estimate), 4 * c.std_error);
}

TEST(Paths, JackknifeOfIdenticalSamples) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const CovarianceEstimate c = jackknife_covariance(x, x);
  EXPECT_NEAR(c.estimate, 2.5, 1e-14);
  EXPECT_GT(c.std_error, 0.0);
}

TEST(Paths, SchemeNames) {
  EXPECT_EQ(scheme_from_string(to_string(Scheme::Exact)), Scheme::Exact);
  EXPECT_THROW(scheme_from_string("milstein"), Error);
}

TEST(Paths, TailSplitNeedsIncrements) {
  const PathEnsemble e = exact_sample(KernelSpec::brownian(), TimeGrid(1.0, 8), 1, 3, 1);
  EXPECT_THROW(tail_components(e, KernelSpec::brownian(), 1.0, 0.25), UnsupportedSchemeError);
}

TEST(Paths, ProbeAtOriginIsZero) {
  const PathEnsemble e = exact_sample(KernelSpec::fbm_general(0.25), TimeGrid(1.0, 8), 1, 10000, 2);
  const auto est = empirical_covariance(e, {{0, 0}, {8, 8}});
  EXPECT_EQ(est[0].estimate, 0.0);
  EXPECT_EQ(est[0].std_error, 0.0);
  EXPECT_LT(std::abs(est[1].estimate - 1.0), 3 * est[1].std_error);
}

TEST(Paths, RiemannLiouvilleTerminalVariance) {
  const KernelSpec k = KernelSpec::riemann_liouville(0.6);
  const PathEnsemble e = kernel_discretized_sample(k, TimeGrid(1.0, 512), 1, 10000, 17);
  const auto est = empirical_covariance(e, {{512, 512}});
  EXPECT_LT(std::abs(est[0].estimate - 1.0 / 1.2), 3 * est[0].std_error);
}
