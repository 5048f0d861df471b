#pragma once

#include "hiapem/types.hpp"

#include <stdexcept>
#include <string>

namespace hiapem {

/// Base class for every error this library throws on purpose.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not match the problem dimensions.
struct DimensionError : SolverError {
  using SolverError::SolverError;
};

/// A configuration value violates its documented range.
struct ConfigError : SolverError {
  using SolverError::SolverError;
};

/// A multiplier vector left the dual region (some z_i < 0).
struct DualFeasibilityError : SolverError {
  using SolverError::SolverError;
};

/// Smoothness metadata (Lipschitz or bound constants) was requested but the
/// problem does not carry it. Callers fall back to line search alone.
struct MetadataError : SolverError {
  using SolverError::SolverError;
};

/// The backtracking trial constant exceeded the hard cap without the descent
/// condition ever holding. Indicates a non-smooth or mis-scaled oracle.
struct LineSearchError : SolverError {
  using SolverError::SolverError;
};

/// An iteration budget ran out. Carries the best iterate seen so the caller
/// can inspect how far the run got.
struct ConvergenceError : SolverError {
  Vec best_x;
  double best_residual;

  ConvergenceError(const std::string& what, Vec x, double residual)
      : SolverError(what), best_x(std::move(x)), best_residual(residual) {}
};

/// The brute-force grid contained no feasible point at the requested
/// resolution.
struct GridError : SolverError {
  using SolverError::SolverError;
};

}  // namespace hiapem
