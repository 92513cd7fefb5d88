#pragma once

#include <stdexcept>
#include <string>

namespace smpkit {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the set where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated on its diagonal.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or an iterative solver stopped short of its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A path ran past its step budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Precondition of an operation not met by the supplied data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace smpkit
