#pragma once

#include <stdexcept>
#include <string>

namespace clonelab {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values: dimension mismatches, non-finite inputs,
// out-of-range parameters, operations unsupported on a given space.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised when the implicit midpoint solve fails to reach tolerance.
// Carries the residual at the point of failure.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Raised when a constructive factorization cannot be completed
// (seed exhaustion, spectra incompatible with the requested form, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Raised when a discrete computation cannot be trusted at the given
// resolution (loop sampling too coarse, refinement cap exceeded).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Raised when route planning for point transport fails.
class PlanningError : public Error {
 public:
  using Error::Error;
};

// Raised when executing a transport plan violates its own contract.
class ExecutionError : public Error {
 public:
  using Error::Error;
};

// Raised when a computed quantity contradicts an internal cross-check.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Raised on malformed or contradictory configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace clonelab
