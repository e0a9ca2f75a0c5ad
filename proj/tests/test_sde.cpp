#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "vlab/errors.hpp"
#include "vlab/sde.hpp"

using namespace vlab;

namespace {

std::shared_ptr<const PathEnsemble> noise(const KernelSpec& k, std::size_t dim, std::size_t n, std::size_t steps = 32) {
  return std::make_shared<const PathEnsemble>(kernel_discretized_sample(k, TimeGrid(1.0, steps), dim, n, 21));
}

}  // namespace

TEST(Sde, ZeroDriftIsShiftedNoise) {
  auto b = noise(KernelSpec::fbm_general(0.3), 2, 10);
  const SolutionEnsemble x = euler_solve(DriftSpec::zero(2), b, {0.5, -1.0});
  for (std::size_t p = 0; p < 10; ++p)
    for (std::size_t i = 0; i < 33; ++i) {
      EXPECT_EQ(x.value(p, i, 0), 0.5 + b->value(p, i, 0));
      EXPECT_EQ(x.value(p, i, 1), -1.0 + b->value(p, i, 1));
    }
}

TEST(Sde, ConstantDriftIsLinear) {
  auto b = noise(KernelSpec::brownian(), 1, 10);
  const SolutionEnsemble x = euler_solve(DriftSpec::constant({2.0}), b, {0.0});
  for (std::size_t p = 0; p < 10; ++p)
    for (std::size_t i = 0; i < 33; ++i) EXPECT_NEAR(x.value(p, i, 0), 2.0 * i / 32.0 + b->value(p, i, 0), 1e-13);
}

TEST(Sde, DriftEnvelope) {
  auto b = noise(KernelSpec::fbm_simple(0.7), 2, 200);
  const SolutionEnsemble x = euler_solve(DriftSpec::holder_power(2, 0.5, 3.0, 1.5), b, {0.0, 0.0});
  EXPECT_LE(drift_envelope_excess(x), 1e-12);
  EXPECT_EQ(x.drift_bound(), 1.5);
}

TEST(Sde, DimensionMismatch) {
  auto b = noise(KernelSpec::brownian(), 2, 3);
  EXPECT_THROW(euler_solve(DriftSpec::zero(1), b, {0.0, 0.0}), DimensionMismatch);
  EXPECT_THROW(euler_solve(DriftSpec::zero(2), b, {0.0}), DimensionMismatch);
}

TEST(Sde, AuxiliaryProcessConstantDriftEqualsSolution) {
  auto b = noise(KernelSpec::brownian(), 1, 20);
  const SolutionEnsemble x = euler_solve(DriftSpec::constant({-0.7}), b, {1.0});
  const auto y = auxiliary_process(x, 1.0, 0.25);
  for (std::size_t p = 0; p < 20; ++p) EXPECT_NEAR(y[p], x.value(p, 32, 0), 1e-13);
}

TEST(Sde, AuxiliaryProcessFreezesDrift) {
  auto b = noise(KernelSpec::brownian(), 1, 20);
  const DriftSpec d = DriftSpec::holder_power(1, 0.5, 1.0, 2.0);
  const SolutionEnsemble x = euler_solve(d, b, {0.3});
  const auto y = auxiliary_process(x, 1.0, 0.25);
  for (std::size_t p = 0; p < 20; ++p) {
    const double xs = x.value(p, 24, 0);
    double bs = 0.0;
    d.eval(0.75, &xs, &bs);
    EXPECT_NEAR(y[p], xs + 0.25 * bs + b->value(p, 32, 0) - b->value(p, 24, 0), 1e-12);
  }
}

TEST(Sde, AuxiliaryProcessWholeInterval) {
  auto b = noise(KernelSpec::brownian(), 1, 20);
  const DriftSpec d = DriftSpec::holder_power(1, 0.5, 1.0, 2.0);
  const SolutionEnsemble x = euler_solve(d, b, {0.3});
  const auto y = auxiliary_process(x, 0.5, 0.5);
  double b0 = 0.0;
  const double x0 = 0.3;
  d.eval(0.0, &x0, &b0);
  for (std::size_t p = 0; p < 20; ++p) EXPECT_NEAR(y[p], 0.3 + 0.5 * b0 + b->value(p, 16, 0), 1e-12);
  EXPECT_THROW(auxiliary_process(x, 0.5, 0.75), DomainError);
  EXPECT_THROW(auxiliary_process(x, 0.5, 0.0), DomainError);
}

TEST(Sde, AuxiliaryBeforeWindowIsSolution) {
  auto b = noise(KernelSpec::brownian(), 1, 5);
  const SolutionEnsemble x = euler_solve(DriftSpec::holder_power(1, 0.5, 1.0, 2.0), b, {0.0});
  const auto y = auxiliary_process(x, 1.0, 0.25, 0.5);
  for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(y[p], x.value(p, 16, 0));
}

TEST(Sde, GapMomentShrinksWithWindow) {
  auto b = noise(KernelSpec::fbm_general(0.7), 1, 2000, 64);
  const SolutionEnsemble x = euler_solve(DriftSpec::holder_power(1, 0.5, 1.0, 2.0), b, {0.0});
  const MeanSE big = xy_gap_moment(x, 1.0, 0.5, 1.0), small = xy_gap_moment(x, 1.0, 1.0 / 16, 1.0);
  EXPECT_GT(big.mean, small.mean);
  EXPECT_EQ(xy_gap_moment(euler_solve(DriftSpec::zero(1), b, {0.0}), 1.0, 0.5, 1.0).mean, 0.0);
}

TEST(Sde, PathDependentStateOnlyMatchesMarkov) {
  auto b = noise(KernelSpec::fbm_general(0.7), 1, 10);
  const DriftSpec d = DriftSpec::holder_power(1, 0.5, 1.0, 2.0);
  const SolutionEnsemble a = euler_solve(d, b, {0.1});
  const SolutionEnsemble c = path_dependent_solve(PathDependentDrift::state_only(d),
                                                  VProcessSpec::with_declared_delta(VKind::DrivingWiener, 0.5, 0.7), b, {0.1});
  for (std::size_t p = 0; p < 10; ++p) EXPECT_NEAR(a.value(p, 32, 0), c.value(p, 32, 0), 1e-13);
}

TEST(Sde, DeclaredDelta) {
  EXPECT_EQ(VProcessSpec::with_declared_delta(VKind::DrivingWiener, 0.4, 0.7).delta, 0.2);
  EXPECT_EQ(VProcessSpec::with_declared_delta(VKind::RunningIntegralOfX, 0.4, 0.7).delta, 0.4);
  EXPECT_NEAR(VProcessSpec::with_declared_delta(VKind::NoiseItself, 0.4, 0.7).delta, 0.28, 1e-15);
}

TEST(Sde, DrivingWienerMomentExponent) {
  auto b = noise(KernelSpec::fbm_general(0.7), 1, 4000, 128);
  const DriftSpec zero = DriftSpec::zero(1);
  const SolutionEnsemble x = path_dependent_solve(PathDependentDrift(zero, DriftSpec::weierstrass(1, 0.4, 1.0), 0.5),
                                                  VProcessSpec::with_declared_delta(VKind::DrivingWiener, 0.4, 0.7), b,
                                                  {0.0});
  const ConditionFit f = fit_v_moment_exponent(x, 0.4, 1.0, logspace(1.0 / 128, 0.5, 7));
  EXPECT_NEAR(f.exponent_estimate, 0.2, 0.03);
}

TEST(Sde, DriftSpecChecks) {
  EXPECT_THROW(DriftSpec::holder_power(1, 1.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(DriftSpec::holder_power(1, 0.5, 1.0, -1.0), DomainError);
  EXPECT_THROW(DriftSpec::registered("nope", 1, 0.5, 1.0), Error);
  EXPECT_TRUE(DriftSpec::zero(3).is_zero());
  const DriftSpec w = DriftSpec::weierstrass(1, 0.4, 1.0);
  for (double u : {-2.0, 0.1, 3.3}) {
    double out = 0.0;
    w.eval(0.0, &u, &out);
    EXPECT_LE(std::abs(out), 1.0);
  }
}
