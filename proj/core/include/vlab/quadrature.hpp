#pragma once

#include <functional>

namespace vlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

/// Integrand that receives the point x together with its exact distances to both ends,
/// da = x − a and db = b − x. Singular integrands use the small distance, never x itself.
using EndpointIntegrand = std::function<double(double x, double da, double db)>;

/// Double-exponential quadrature on [a, b], split at the midpoint and parametrized from
/// each endpoint so integrable endpoint singularities keep full relative accuracy.
/// Throws NumericError when the estimated relative error exceeds `fail_tol`.
QuadratureResult integrate_endpoints(const EndpointIntegrand& f, double a, double b,
                                     double tol = 1e-12, double fail_tol = 1e-7);

/// Double-exponential quadrature of a plain integrand on [a, b].
QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                                     double tol = 1e-12, double fail_tol = 1e-7);

/// Adaptive 61-point Gauss–Kronrod on [a, b] for smooth integrands.
QuadratureResult integrate_smooth(const std::function<double(double)>& f, double a, double b,
                                  double tol = 1e-10, double fail_tol = 1e-6);

}  // namespace vlab
