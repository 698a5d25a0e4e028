#pragma once

#include <stdexcept>
#include <string>

#include "prodint/matrix.hpp"

namespace prodint {

/// Input does not belong to the declared domain (algebra span, group
/// membership, chart ball, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A matrix that must be invertible is numerically singular.
struct InversionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: unsorted partitions, mismatched intervals,
/// uncovered piecewise decompositions, unknown identifiers.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quadrature refinement hit its panel cap before reaching tolerance.
/// Carries the last achieved refinement delta and estimate.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved, Mat estimate)
      : std::runtime_error(what), achieved_delta(achieved), last_estimate(std::move(estimate)) {}
  double achieved_delta;
  Mat last_estimate;
};

/// Adaptive stepping failed to converge; carries the last iterate.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, Mat iterate)
      : std::runtime_error(what), last_iterate(std::move(iterate)) {}
  Mat last_iterate;
};

/// A required certificate (e.g. a constricted constant) is missing.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace prodint
