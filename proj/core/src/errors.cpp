#include "vlab/errors.hpp"

#include <sstream>

namespace vlab {

namespace {
std::string with_tolerance(const std::string& what, double tol) {
  std::ostringstream os;
  os << what << " (achieved tolerance " << tol << ")";
  return os.str();
}
}  // namespace

NumericError::NumericError(const std::string& what, double achieved_tolerance)
    : Error(with_tolerance(what, achieved_tolerance)), achieved_(achieved_tolerance) {}

ValidationError::ValidationError(std::string field, const std::string& message)
    : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

}  // namespace vlab
