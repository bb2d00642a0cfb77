#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Field, coefficient vector or grid of the wrong size.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid construction failed (node solve did not converge, bad sizes).
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transferred density does not have finite limits at the poles.
class DecayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature could not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A flow state violated its invariants (non-positive field, bad step).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A diagnostic was asked of a state where it is undefined.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extinction-time extrapolation failed (non-monotone or poorly fitting tail).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracflow
