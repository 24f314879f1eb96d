#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dihedral {

enum class ErrorKind {
  Domain,
  Range,
  DegenerateOpening,
  PoleEndpoint,
  Reference,
  Singularity,
  Validation,
  Bracket,
  Accuracy,
  Solver,
  Configuration,
  Resolution,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error thrown by the library. The CLI maps the two
/// subclasses below to distinct exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad input: out-of-domain arguments, malformed specs, unknown references.
class ValidationError : public Error {
 public:
  ValidationError(ErrorKind kind, const std::string& what, std::string field = {})
      : Error(kind, what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical procedure failed to reach its contract (bracketing,
/// quadrature accuracy, solver gap, grid resolution).
class NumericalError : public Error {
 public:
  NumericalError(ErrorKind kind, const std::string& what, double estimate = 0.0)
      : Error(kind, what), estimate_(estimate) {}
  /// Achieved error estimate or gap at the point of failure.
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

[[noreturn]] inline void domain_error(const std::string& what, std::string field = {}) {
  throw ValidationError(ErrorKind::Domain, what, std::move(field));
}

}  // namespace dihedral
