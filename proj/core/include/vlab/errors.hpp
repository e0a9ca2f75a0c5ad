#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's domain (bad (t,s), ε ≥ t, m = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric procedure failed to reach its tolerance. Carries what it did achieve.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved_tolerance);
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Operation needs data the ensemble's sampling scheme does not produce.
class UnsupportedSchemeError : public Error {
 public:
  using Error::Error;
};

/// Too few usable points for a regression or exponent fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Configuration failed validation; `field()` is the dotted path of the offending entry.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Array shapes or dimensions do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace vlab
