#pragma once

#include <vector>

#include "prodint/context.hpp"
#include "prodint/matrix.hpp"

namespace prodint {

/// Lie bracket [X, Y] = XY - YX. Inputs must lie in span(basis).
AlgebraElement bracket(const LieContext& ctx, const AlgebraElement& x, const AlgebraElement& y);

/// ad_{X1} o ... o ad_{Xn} (Y), folded left to right.
AlgebraElement ad_chain(const LieContext& ctx, const std::vector<AlgebraElement>& xs,
                        const AlgebraElement& y);

/// Adjoint action Ad_g(Y) = g Y g^{-1}, projected into the algebra.
AlgebraElement adjoint(const LieContext& ctx, const GroupElement& g, const AlgebraElement& y);

/// Group exponential. Matrix-nilpotent arguments are summed by the
/// terminating power series (exact in floating point); everything else goes
/// through scaling-and-squaring.
GroupElement exponential(const LieContext& ctx, const AlgebraElement& x);

/// Unvalidated kernels for inner loops; callers have already checked span
/// membership of their inputs.
namespace detail {
inline Mat bracket_raw(const Mat& x, const Mat& y) { return commutator(x, y); }
Mat ad_chain_raw(const std::vector<Mat>& xs, const Mat& y);
Mat exp_raw(const Mat& x);
}  // namespace detail

/// Chart maps for Xi(g) = g - 1. Omega(x, X) = X (1+x)^{-1} carries a chart
/// velocity to the right logarithmic derivative; omega_tilde(x, X) = X (1+x)
/// is its inverse in the second argument. `x` must satisfy
/// ||x||_op < chart_radius.
Mat chart_omega(const LieContext& ctx, const Mat& x, const Mat& X);
Mat chart_omega_inv(const LieContext& ctx, const Mat& x, const Mat& X);

}  // namespace prodint
