#pragma once

#include <stdexcept>
#include <string>

namespace rtoda {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain where a construction is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when an inverse fails its residual check.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// sinh(k eta) too close to zero for a gauge matrix to exist.
class SingularGaugeError : public Error {
 public:
  using Error::Error;
};

/// Bethe solver failure. Carries the last residual and the homotopy stage
/// (interaction scale in [0, 1]) reached before giving up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, double stage)
      : Error(what), last_residual_(last_residual), stage_(stage) {}
  double last_residual() const noexcept { return last_residual_; }
  double stage() const noexcept { return stage_; }

 private:
  double last_residual_;
  double stage_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtoda
