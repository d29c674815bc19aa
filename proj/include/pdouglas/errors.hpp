#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdouglas {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite input, p <= 1, malformed preset text and similar.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Point outside the region where a kernel or evaluator is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated on its diagonal (x = y for Green, z = w for Feller).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Sample grid too coarse for the requested truncation order.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Missing ingredient in a configuration (e.g. no derivative for the diagonal).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input outside the class the algorithm supports (non-Lipschitz data, p < 2 where p >= 2 is required).
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

/// A sampled precondition was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Radial limit did not settle.
class TraceFailure : public Error {
 public:
  using Error::Error;
};

/// Walk-on-spheres exceeded its step cap.
class NonTermination : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach its tolerance. Carries human-readable diagnostics
/// (offending cells, last error estimate).
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, std::vector<std::string> diagnostics = {})
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace pdouglas
