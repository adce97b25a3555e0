#pragma once

#include <stdexcept>
#include <string>

namespace cbo {

// Base of every error the engine raises. The C API maps each subclass to a
// status code; nothing else crosses that boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition failed (log of a nonpositive ratio, zero
/// resistance, a point outside an evaluator's domain).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration could not be parsed or is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The evaluator could not be started, or failed too often to continue.
class EvaluatorUnavailable : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even at the largest allowed jitter.
class SingularFitError : public Error {
 public:
  using Error::Error;
};

/// A run directory is missing files or holds malformed data.
class RunInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbo
