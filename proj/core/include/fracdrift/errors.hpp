#pragma once

#include <stdexcept>
#include <string>

namespace fracdrift {

// Invalid arguments or configuration. The CLI maps this to exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested accuracy could not be reached. Carries the achieved error estimate.
// The CLI maps this to exit code 3.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

// Linear algebra breakdown (e.g. Cholesky failure after jitter).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A finite prefix is too short for the requested construction.
class PrefixTooShort : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace fracdrift
