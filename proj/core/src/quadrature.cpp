#include "vlab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "vlab/errors.hpp"

namespace vlab {

namespace {

// One rule per thread: the abscissa tables grow lazily and are not safe to share.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

void check(const char* what, double value, double error, double l1, double fail_tol) {
  if (!std::isfinite(value)) throw NumericError(std::string(what) + ": non-finite result", error);
  const double scale = std::max(l1, std::abs(value));
  // Pieces far below any quantity of interest are accepted on an absolute floor.
  if (error > fail_tol * scale && error > 1e-18)
    throw NumericError(std::string(what) + ": quadrature did not converge", scale > 0 ? error / scale : error);
}

}  // namespace

QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                                     double tol, double fail_tol) {
  QuadratureResult r;
  if (a == b) return r;
  // Intervals narrow relative to their position defeat the double-exponential abscissae;
  // the integrand is effectively smooth on them.
  if (std::abs(b - a) < 1e-6 * std::max(std::abs(a), std::abs(b))) {
    r.value = boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
    r.error = std::abs(r.value - boost::math::quadrature::gauss<double, 20>::integrate(f, a, b));
    check("Gauss-Legendre", r.value, r.error, std::abs(r.value), fail_tol);
    return r;
  }
  double l1 = 0;
  r.value = tanh_sinh_rule().integrate(f, a, b, tol, &r.error, &l1);
  r.error *= std::abs(b - a) / 2;  // Boost reports the error on the reference interval
  check("tanh-sinh", r.value, r.error, l1, fail_tol);
  return r;
}

QuadratureResult integrate_endpoints(const EndpointIntegrand& f, double a, double b, double tol,
                                     double fail_tol) {
  QuadratureResult r;
  if (!(b > a)) return r;
  const double half = (b - a) / 2;
  double e1 = 0, e2 = 0, l1a = 0, l1b = 0;
  auto& rule = tanh_sinh_rule();
  const double left = rule.integrate([&](double u) { return f(a + u, u, (b - a) - u); }, 0.0, half, tol,
                                     &e1, &l1a);
  const double right = rule.integrate([&](double v) { return f(b - v, (b - a) - v, v); }, 0.0, half, tol,
                                      &e2, &l1b);
  r.value = left + right;
  r.error = (e1 + e2) * half / 2;
  check("endpoint quadrature", r.value, r.error, l1a + l1b, fail_tol);
  return r;
}

QuadratureResult integrate_smooth(const std::function<double(double)>& f, double a, double b, double tol,
                                  double fail_tol) {
  QuadratureResult r;
  if (a == b) return r;
  double l1 = 0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &r.error, &l1);
  check("Gauss-Kronrod", r.value, r.error, l1, fail_tol);
  return r;
}

}  // namespace vlab
