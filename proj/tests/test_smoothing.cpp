#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "vlab/errors.hpp"
#include "vlab/quadrature.hpp"
#include "vlab/smoothing.hpp"

using namespace vlab;

namespace {

double norm_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

std::shared_ptr<const PathEnsemble> noise(const KernelSpec& k, std::size_t n, std::size_t steps = 32) {
  return std::make_shared<const PathEnsemble>(kernel_discretized_sample(k, TimeGrid(1.0, steps), 1, n, 5));
}

}  // namespace

TEST(Smoothing, FiniteDifferenceExamples) {
  auto id = [](double x) { return x; };
  auto sq = [](double x) { return x * x; };
  EXPECT_NEAR(finite_difference(id, 1.7, 0.3, 1), 0.3, 1e-15);
  EXPECT_NEAR(finite_difference(sq, -2.0, 0.5, 2), 0.5, 1e-14);
  EXPECT_EQ(finite_difference(id, 3.0, 0.7, 2), 0.0);
  EXPECT_THROW(finite_difference(id, 0.0, 0.0, 1), DomainError);
  EXPECT_THROW(finite_difference(id, 0.0, 0.1, 0), DomainError);
}

TEST(Smoothing, DifferencesAnnihilateLowDegreePolynomials) {
  for (int m = 1; m <= 4; ++m)
    for (int deg = 0; deg < m; ++deg)
      for (double x : {-1.3, 0.0, 2.2})
        for (double h : {1e-3, 0.1, 0.9}) {
          auto p = [deg](double y) { return std::pow(y, deg) - 0.5 * y + 1.0 * (deg >= 1); };
          auto f = [&](double y) { return deg >= 1 ? p(y) : 4.0; };
          EXPECT_NEAR(finite_difference(f, x, h, m), 0.0, 1e-12) << m << " " << deg;
        }
}

TEST(Smoothing, VectorDifferenceMatchesBinomialSum) {
  auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(0.3 * x[1]); };
  const std::vector<double> x{0.2, -0.4}, h{0.1, 0.05};
  for (int m = 1; m <= 3; ++m) {
    double direct = 0.0;
    for (int j = 0; j <= m; ++j) {
      const std::vector<double> y{x[0] + j * h[0], x[1] + j * h[1]};
      direct += ((m - j) % 2 ? -1.0 : 1.0) * binomial(m, j) * f(y);
    }
    EXPECT_NEAR(finite_difference(f, x, h, m), direct, 1e-14);
  }
  const std::vector<double> bad{0.1};
  EXPECT_THROW(finite_difference(f, x, bad, 1), DimensionMismatch);
}

TEST(Smoothing, WindowDensity) {
  const std::vector<double> z1{0.0}, z2{0.0, 0.0};
  EXPECT_NEAR(gaussian_window_density(1.0, z1, 1), 1 / std::sqrt(2 * M_PI), 1e-15);
  EXPECT_NEAR(gaussian_window_density(1.0, z2, 2), 1 / (2 * M_PI), 1e-15);
  const double total = integrate_smooth(
      [](double x) {
        const double y[1] = {x};
        return gaussian_window_density(0.3, y, 1);
      },
      -10, 10, 1e-12).value;
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(Smoothing, FirstDifferenceL1ClosedForm) {
  // ‖g(·−h) − g‖_{L1} = 2(2Φ(|h|/2σ) − 1).
  for (double r : {1e-4, 0.01, 0.3, 1.0, 3.0})
    EXPECT_NEAR(gaussian_difference_l1(1.0, r, 1) / (2 * (2 * norm_cdf(r / 2) - 1)), 1.0, 1e-8) << r;
  EXPECT_NEAR(gaussian_difference_l1(1.0, 1e-6, 1) / 1e-6, std::sqrt(2 / M_PI), 1e-6);
  // ∫|g''| = 4 g(1) for the standard normal.
  EXPECT_NEAR(gaussian_difference_l1(1.0, 1e-4, 2) / 1e-8, 4 * std::exp(-0.5) / std::sqrt(2 * M_PI), 1e-3);
}

TEST(Smoothing, L1SlopeEqualsOrder) {
  for (int m : {1, 2, 4}) {
    const double a = gaussian_difference_l1(1.0, 1e-3, m), b = gaussian_difference_l1(1.0, 1e-2, m);
    EXPECT_NEAR(std::log10(b / a), m, 0.01) << m;
  }
}

TEST(Smoothing, RatioScaleInvariant) {
  const std::vector<double> h{0.1}, h2{0.4};
  EXPECT_NEAR(smoothing_bound_ratio(1.0, h, 2, 0.5, 1.0) / smoothing_bound_ratio(16.0, h2, 2, 0.5, 1.0),
              std::pow(4.0, 2), 1e-8);
  EXPECT_NEAR(smoothing_bound_ratio(1.0, std::vector<double>{1e-5}, 1, 0.5, 1.0), std::sqrt(2 / M_PI), 1e-5);
}

TEST(Smoothing, TestFunctions) {
  const TestFunctionSpec c = TestFunctionSpec::cosine(1, 0.9, 2.0, 1.5, 0.3);
  EXPECT_EQ(c.sup_norm(), 2.0);
  const std::vector<double> x{0.4};
  EXPECT_NEAR(c(x), 2.0 * std::cos(1.5 * 0.4 + 0.3), 1e-15);
  const TestFunctionSpec b = TestFunctionSpec::holder_bump(1, 0.5, 1.0, 2.0);
  EXPECT_NEAR(b.holder_seminorm(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(b(std::vector<double>{3.0}), 0.0);
  EXPECT_THROW(TestFunctionSpec::cosine(1, 1.5, 1.0, 1.0), DomainError);
}

TEST(Smoothing, BrownianCosineClosedForm) {
  auto b = noise(KernelSpec::brownian(), 100000);
  const SolutionEnsemble x = euler_solve(DriftSpec::zero(1), b, {0.2});
  const TestFunctionSpec phi = TestFunctionSpec::cosine(1, 1.0, 1.0, 1.0, 0.0);
  for (int m : {1, 2}) {
    const std::vector<double> h{0.3};
    const MeanSE pe = estimate_pe(x, 1.0, 0.5, phi, h, m);
    const std::complex<double> z = std::exp(std::complex<double>(0, 0.2)) * std::exp(-0.5) *
                                   std::pow(std::exp(std::complex<double>(0, 0.3)) - 1.0, m);
    EXPECT_LT(std::abs(pe.mean - z.real()), 3 * pe.std_error) << m;
  }
}

TEST(Smoothing, TrivialExactness) {
  auto b = noise(KernelSpec::fbm_general(0.7), 500);
  const std::vector<double> h{0.1};
  const TestFunctionSpec phi = TestFunctionSpec::cosine(1, 0.9, 1.0, 2.0, 0.3);
  for (const DriftSpec& d : {DriftSpec::zero(1), DriftSpec::constant({1.3})}) {
    const SolutionEnsemble x = euler_solve(d, b, {0.0});
    const MeanSE ae = estimate_ae(x, 1.0, 0.25, phi, h, 2);
    EXPECT_EQ(ae.mean, 0.0);
    EXPECT_EQ(ae.std_error, 0.0);
  }
  const SolutionEnsemble x = euler_solve(DriftSpec::holder_power(1, 0.5, 1.0, 2.0), b, {0.0});
  const MeanSE pe = estimate_pe(x, 1.0, 0.25, TestFunctionSpec::constant(1, 3.0), h, 1);
  EXPECT_EQ(pe.mean, 0.0);
  EXPECT_EQ(pe.std_error, 0.0);
}

TEST(Smoothing, IndependentAeNoisierThanCoupled) {
  const KernelSpec k = KernelSpec::fbm_general(0.7);
  auto b1 = noise(k, 4000), b2 = std::make_shared<const PathEnsemble>(kernel_discretized_sample(k, TimeGrid(1.0, 32), 1, 4000, 6));
  const DriftSpec d = DriftSpec::holder_power(1, 0.5, 1.0, 2.0);
  const SolutionEnsemble x1 = euler_solve(d, b1, {0.0}), x2 = euler_solve(d, b2, {0.0});
  const TestFunctionSpec phi = TestFunctionSpec::cosine(1, 0.9, 1.0, 1.0, 0.3);
  const std::vector<double> h{0.25};
  EXPECT_GT(estimate_ae_independent(x1, x2, 1.0, 0.125, phi, h, 1).std_error,
            5 * estimate_ae(x1, 1.0, 0.125, phi, h, 1).std_error);
}

TEST(Smoothing, RegressionExactPowerLaw) {
  std::vector<ScalingPoint> pts;
  for (double x : logspace(0.01, 1.0, 6)) pts.push_back({x, 3.0 * std::pow(x, 2.5), 0.0});
  const ScalingFit f = scaling_regression(pts);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  for (auto& p : pts) p.value = 7.0;
  EXPECT_NEAR(scaling_regression(pts).slope, 0.0, 1e-12);
}

TEST(Smoothing, RegressionExcludesNoise) {
  std::vector<ScalingPoint> pts;
  for (double x : logspace(0.01, 1.0, 6)) pts.push_back({x, x, 0.01 * x});
  pts.push_back({2.0, 1e-3, 1.0});
  const ScalingFit f = scaling_regression(pts);
  EXPECT_EQ(f.excluded, std::vector<std::size_t>{6});
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  pts.resize(3);
  EXPECT_THROW(scaling_regression(pts), InsufficientDataError);
}

TEST(Smoothing, RegressionCoverage) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> z;
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<ScalingPoint> pts;
    for (double x : logspace(1e-3, 1e-1, 10)) {
      const double v = std::pow(x, 1.5), se = 0.05 * v;
      pts.push_back({x, v + se * z(gen), se});
    }
    const ScalingFit f = scaling_regression(pts);
    covered += f.ci_low <= 1.5 && 1.5 <= f.ci_high;
  }
  EXPECT_GE(covered, 90);
}

TEST(Smoothing, TheoremExponents) {
  EXPECT_NEAR(theorem_exponents(0.5, 1.0, 0.5).eta_t1, 2.0, 1e-15);
  EXPECT_NEAR(theorem_exponents(0.7, 0.5, 0.7).eta_t1, 0.65 / 0.7, 1e-15);
  const TheoremExponents e = theorem_exponents(0.7, 0.5, 0.7, 0.2, 2, 0.9);
  EXPECT_NEAR(*e.mu, 0.2, 1e-15);
  EXPECT_NEAR(*e.eta_t2, 0.5 / 0.7, 1e-15);
  EXPECT_NEAR(e.ae_exponent, 1.35 * 0.9, 1e-15);
  EXPECT_NEAR(*e.ae_exponent_t2, 1.2 * 0.9, 1e-15);
  EXPECT_NEAR(e.s, 2 * 0.9 * 1.35 / (0.9 * 1.35 + 1.4), 1e-15);
  EXPECT_NEAR(theorem_exponents(0.7, 0.5, 0.7, 0.9).mu.value(), 0.35, 1e-15);
}
