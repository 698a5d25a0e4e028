#pragma once

#include <functional>
#include <vector>

#include "prodint/curve.hpp"
#include "prodint/matrix.hpp"

namespace prodint {

/// Composite Gauss-Legendre, 5 nodes per panel, panels halved until
/// successive estimates agree to rel_tol (relative, with absolute floor 1).
/// Breakpoints always coincide with panel boundaries.
struct QuadratureOptions {
  double rel_tol = 1e-12;
  int max_panels = 1 << 14;
};

/// Integral of gamma over its whole interval; linear in gamma, additive over
/// subintervals. Throws QuadratureError (carrying the achieved estimate) if
/// the panel cap is reached before the tolerance.
Mat riemann_integral(const Curve& gamma, const QuadratureOptions& opts = {});

/// Integral over [a, b] within the curve interval; a > b negates.
Mat riemann_integral(const Curve& gamma, double a, double b, const QuadratureOptions& opts = {});

/// Scalar-valued counterpart for norm integrands.
double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breakpoints = {},
                        const QuadratureOptions& opts = {});

}  // namespace prodint
