#pragma once

#include <stdexcept>
#include <string>

namespace reflsolve {

/// Operand shapes do not agree (vector length vs matrix columns, ragged clouds, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix is singular to working precision.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative kernel exhausted its sweep budget. Carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A row of the system matrix has zero norm, so its hyperplane is undefined.
class ZeroRowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The points of a cloud do not determine a unique sphere center.
class DegenerateCloudError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (bad counts, malformed files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace reflsolve
