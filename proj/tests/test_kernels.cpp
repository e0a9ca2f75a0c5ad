#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/kernels.hpp"
#include "vlab/stats.hpp"

using namespace vlab;

namespace {

// Trapezoid oracle for the H > 1/2 kernel after u = s + (t−s)y^k, which turns the
// (u−s)^{H−3/2} singularity into the polynomial factor y^{k(H−1/2)−1}.
double simple_kernel_oracle(double H, double t, double s, int k, int n) {
  const double cH = std::sqrt(H * (2 * H - 1) / boost::math::beta(2 - 2 * H, H - 0.5));
  auto g = [&](double y) {
    const double u = s + (t - s) * std::pow(y, k);
    return std::pow(t - s, H - 0.5) * k * std::pow(y, k * (H - 0.5) - 1) * std::pow(u, H - 0.5);
  };
  double sum = 0.5 * (g(0.0) + g(1.0));
  for (int i = 1; i < n; ++i) sum += g(static_cast<double>(i) / n);
  return cH * std::pow(s, 0.5 - H) * sum / n;
}

double fbm_cov(double H, double t, double s) {
  return 0.5 * (std::pow(t, 2 * H) + std::pow(s, 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

}  // namespace

TEST(Kernels, SimpleExamples) {
  EXPECT_EQ(eval_kernel(KernelSpec::brownian(), 1.0, 0.3), 1.0);
  EXPECT_NEAR(eval_kernel(KernelSpec::riemann_liouville(0.75), 1.0, 0.5), std::pow(0.5, 0.25), 1e-15);
  EXPECT_NEAR(eval_kernel(KernelSpec::ornstein_uhlenbeck(2.0), 1.0, 0.75), std::exp(-0.5), 1e-15);
}

TEST(Kernels, SimpleFbmKernelAgainstTrapezoidOracle) {
  const KernelSpec k = KernelSpec::fbm_simple(0.75);
  for (auto [t, s] : {std::pair{1.0, 0.5}, {0.7, 0.2}, {1.0, 0.05}}) {
    const double oracle = simple_kernel_oracle(0.75, t, s, 8, 200000);
    EXPECT_NEAR(eval_kernel(k, t, s) / oracle, 1.0, 1e-6) << t << "," << s;
  }
  const KernelSpec k6 = KernelSpec::fbm_simple(0.6);
  EXPECT_NEAR(eval_kernel(k6, 1.0, 0.1) / simple_kernel_oracle(0.6, 1.0, 0.1, 20, 200000), 1.0, 1e-6);
}

TEST(Kernels, HighPrecisionReferenceValues) {
  // 30-digit arbitrary-precision quadrature.
  EXPECT_NEAR(eval_kernel(KernelSpec::fbm_simple(0.75), 1.0, 0.5), 0.9375919636980572, 1e-12);
  EXPECT_NEAR(eval_kernel(KernelSpec::fbm_simple(0.75), 0.7, 0.2), 0.9803490842384000, 1e-12);
  EXPECT_NEAR(eval_kernel(KernelSpec::fbm_simple(0.6), 1.0, 0.1), 1.1043110547196387, 1e-12);
  const KernelSpec g3 = KernelSpec::fbm_general(0.3), g25 = KernelSpec::fbm_general(0.25);
  EXPECT_NEAR(eval_kernel(g3, 1.0, 0.5) / g3.normalization(), 1.195446413435049, 1e-12);
  EXPECT_NEAR(eval_kernel(g3, 1.0, 0.1) / g3.normalization(), 1.218582165527822, 1e-12);
  EXPECT_NEAR(eval_kernel(g25, 0.7, 0.05) / g25.normalization(), 1.558313288598599, 1e-12);
  EXPECT_NEAR(covariance(KernelSpec::riemann_liouville(0.75), 1.0, 0.5), 0.3149030135953916, 1e-10);
  EXPECT_NEAR(covariance(KernelSpec::riemann_liouville(0.3), 1.0, 0.5), 0.7701578178284368, 1e-10);
}

TEST(Kernels, SimpleConstantIsPositive) {
  EXPECT_NEAR(KernelSpec::fbm_simple(0.75).normalization(), 0.267411158757997581, 1e-12);
}

TEST(Kernels, GeneralFamilyAgreesWithSimpleForLargeHurst) {
  const KernelSpec g = KernelSpec::fbm_general(0.75), s = KernelSpec::fbm_simple(0.75);
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(eval_kernel(g, 1.0, u) / eval_kernel(s, 1.0, u), 1.0, 1e-8);
}

TEST(Kernels, CovarianceExamples) {
  for (double H : {0.25, 0.5, 0.75}) EXPECT_NEAR(covariance(KernelSpec::fbm_general(H), 1.0, 0.5), 0.5, 1e-14);
  EXPECT_EQ(covariance(KernelSpec::brownian(), 0.7, 0.4), 0.4);
  EXPECT_NEAR(covariance(KernelSpec::ornstein_uhlenbeck(1.0), 1.0, 1.0), (1 - std::exp(-2.0)) / 2, 1e-15);
  const KernelSpec rl = KernelSpec::riemann_liouville(0.6);
  EXPECT_NEAR(covariance(rl, 0.8, 0.3), covariance(rl, 0.3, 0.8), 1e-14);
}

TEST(Kernels, QuadratureCovarianceReproducesFbm) {
  for (double H : {0.25, 0.3, 0.75}) {
    const KernelSpec k = KernelSpec::fbm_general(H);
    for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(covariance_by_quadrature(k, t, t) / std::pow(t, 2 * H), 1.0, 1e-4);
    EXPECT_NEAR(covariance_by_quadrature(k, 0.7, 0.2) / fbm_cov(H, 0.7, 0.2), 1.0, 1e-4);
  }
  const KernelSpec s = KernelSpec::fbm_simple(0.7);
  EXPECT_NEAR(covariance_by_quadrature(s, 0.9, 0.9) / std::pow(0.9, 1.4), 1.0, 1e-4);
}

TEST(Kernels, TailVarianceExamples) {
  EXPECT_NEAR(tail_variance(KernelSpec::brownian(), 1.0, 0.1), 0.1, 1e-15);
  EXPECT_NEAR(tail_variance(KernelSpec::riemann_liouville(0.75), 1.0, 0.5), std::pow(0.5, 1.5) / 1.5, 1e-14);
  EXPECT_NEAR(tail_variance(KernelSpec::ornstein_uhlenbeck(1.0), 1.0, 0.1), (1 - std::exp(-0.2)) / 2, 1e-15);
  EXPECT_THROW(tail_variance(KernelSpec::brownian(), 0.5, 0.6), DomainError);
}

TEST(Kernels, TailVarianceClosedFormMatchesQuadrature) {
  for (const KernelSpec& k : {KernelSpec::riemann_liouville(0.3), KernelSpec::riemann_liouville(0.8),
                              KernelSpec::ornstein_uhlenbeck(1.5), KernelSpec::brownian()})
    for (double t : {0.3, 1.0})
      for (double e : {1e-4, 0.01, 0.2})
        EXPECT_NEAR(tail_variance_by_quadrature(k, t, e) / tail_variance(k, t, e), 1.0, 1e-6);
}

TEST(Kernels, TailVarianceMonotoneInWindow) {
  for (const KernelSpec& k : {KernelSpec::fbm_general(0.3), KernelSpec::fbm_simple(0.7), KernelSpec::ornstein_uhlenbeck()}) {
    double prev = 0.0;
    for (double e : logspace(1e-4, 0.9, 8)) {
      const double v = tail_variance(k, 1.0, e);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Kernels, IncrementVariance) {
  EXPECT_NEAR(increment_variance(KernelSpec::brownian(), 1.0, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(increment_variance(KernelSpec::fbm_general(0.3), 1.0, 0.5), std::pow(0.5, 0.6), 1e-12);
  EXPECT_EQ(increment_variance(KernelSpec::ornstein_uhlenbeck(), 0.4, 0.4), 0.0);
  const KernelSpec rl = KernelSpec::riemann_liouville(0.6);
  const double direct = covariance(rl, 1, 1) + covariance(rl, 0.5, 0.5) - 2 * covariance(rl, 1, 0.5);
  EXPECT_NEAR(increment_variance(rl, 1.0, 0.5), direct, 1e-9);
}

TEST(Kernels, SimpleKernelLowerBound) {
  const KernelSpec k = KernelSpec::fbm_simple(0.7);
  for (double t : {0.3, 1.0})
    for (double s : {0.01, 0.1, 0.25})
      if (s < t) EXPECT_GE(eval_kernel(k, t, s), k.lower_bound_constant() * std::pow(t - s, 0.2));
}

TEST(Kernels, ConditionFits) {
  EXPECT_NEAR(fit_condition_cc1(KernelSpec::brownian(), 1.0, logspace(1e-4, 1e-1, 6)).exponent_estimate, 0.5, 1e-12);
  EXPECT_NEAR(fit_condition_cc1(KernelSpec::riemann_liouville(0.3), 1.0, logspace(1e-4, 1e-1, 6)).exponent_estimate,
              0.3, 1e-10);
  EXPECT_NEAR(
      fit_condition_cc1(KernelSpec::ornstein_uhlenbeck(), 1.0, logspace(1e-5, 1e-3, 6)).exponent_estimate, 0.5, 0.01);
  for (double H : {0.3, 0.7}) {
    const KernelSpec k = KernelSpec::fbm_general(H);
    EXPECT_NEAR(fit_condition_cc1(k, 1.0, default_cc1_grid(k, 1.0)).exponent_estimate, H, 0.02);
    EXPECT_NEAR(fit_condition_cc2(k, default_cc2_pairs(k, 1.0)).exponent_estimate, H, 1e-9);
  }
  EXPECT_NEAR(fit_condition_cc2(KernelSpec::brownian(), default_cc2_pairs(KernelSpec::brownian(), 1.0)).exponent_estimate,
              0.5, 1e-12);
  std::vector<std::pair<double, double>> ou_pairs;
  for (double g : logspace(1e-4, 1e-2, 8)) ou_pairs.emplace_back(0.5 - g, 0.5);
  EXPECT_NEAR(fit_condition_cc2(KernelSpec::ornstein_uhlenbeck(), ou_pairs).exponent_estimate, 0.5, 0.02);
}

TEST(Kernels, FitGridValidation) {
  const KernelSpec b = KernelSpec::brownian();
  EXPECT_THROW(fit_condition_cc1(b, 1.0, {1e-3, 2e-3, 3e-3, 4e-3}), DomainError);
  EXPECT_THROW(fit_condition_cc1(b, 1.0, {1e-4, 1e-3, 1e-2}), DomainError);
  EXPECT_THROW(fit_condition_cc1(b, 1.0, {1e-4, 1e-2, 1e-3, 1e-1}), DomainError);
}

TEST(Kernels, SpecValidation) {
  EXPECT_THROW(KernelSpec::fbm_simple(0.4), DomainError);
  EXPECT_THROW(KernelSpec::fbm_general(1.0), DomainError);
  EXPECT_THROW(KernelSpec::ornstein_uhlenbeck(-1.0), DomainError);
  EXPECT_THROW(eval_kernel(KernelSpec::brownian(), 0.5, 0.7), DomainError);
  EXPECT_THROW(eval_kernel(KernelSpec::brownian(1.0), 1.5, 0.7), DomainError);
}

TEST(Kernels, TableCsv) {
  std::ostringstream out;
  write_kernel_table_csv(out, KernelSpec::brownian(), {0.5, 1.0}, {0.25, 0.75});
  EXPECT_EQ(out.str().substr(0, 8), "t,s,K,R\n");
}
