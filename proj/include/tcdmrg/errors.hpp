#pragma once

#include <stdexcept>
#include <string>

namespace tcdmrg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape/extent mismatches and size-cap violations.
struct DimensionError : Error {
  using Error::Error;
};

// Non-finite input, LAPACK failures, iteration breakdown inside dense solvers.
struct NumericError : Error {
  using Error::Error;
};

// Invalid user-facing configuration (lattice geometry, model parameters, files).
struct ConfigError : Error {
  using Error::Error;
};

// Out-of-range site / basis references.
struct IndexError : Error {
  using Error::Error;
};

// A caller violated a documented precondition (e.g. passed a non-maximum
// matching to the vertex-cover construction).
struct ContractViolationError : Error {
  using Error::Error;
};

// Iterative eigensolver gave up; carries the last residual norm for diagnostics.
struct SolverError : Error {
  SolverError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

}  // namespace tcdmrg
