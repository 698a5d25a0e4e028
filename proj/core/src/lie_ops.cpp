#include "prodint/lie_ops.hpp"

#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "prodint/errors.hpp"

namespace prodint {

namespace {

void require_in_span(const LieContext& ctx, const Mat& m, const char* role) {
  if (!ctx.in_span(m)) {
    std::ostringstream os;
    os << role << " is not in span(basis) of context " << ctx.name() << ":\n" << m;
    throw DomainError(os.str());
  }
}

}  // namespace

AlgebraElement bracket(const LieContext& ctx, const AlgebraElement& x, const AlgebraElement& y) {
  require_in_span(ctx, x.matrix, "bracket argument X");
  require_in_span(ctx, y.matrix, "bracket argument Y");
  return AlgebraElement{detail::bracket_raw(x.matrix, y.matrix)};
}

AlgebraElement ad_chain(const LieContext& ctx, const std::vector<AlgebraElement>& xs,
                        const AlgebraElement& y) {
  if (xs.empty()) throw ArgumentError("ad_chain needs at least one operator");
  for (const auto& x : xs) require_in_span(ctx, x.matrix, "ad_chain operator");
  require_in_span(ctx, y.matrix, "ad_chain argument");
  Mat acc = y.matrix;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) acc = detail::bracket_raw(it->matrix, acc);
  return AlgebraElement{acc};
}

Mat detail::ad_chain_raw(const std::vector<Mat>& xs, const Mat& y) {
  Mat acc = y;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) acc = bracket_raw(*it, acc);
  return acc;
}

AlgebraElement adjoint(const LieContext& ctx, const GroupElement& g, const AlgebraElement& y) {
  require_in_span(ctx, y.matrix, "adjoint argument Y");
  const Mat conj = g.matrix * y.matrix * invert(g.matrix);
  // Conjugation by a group member stays in the algebra; reject anything
  // farther off-span than rounding noise (a modeling error, e.g. g outside
  // the normalizer).
  if (!ctx.in_span(conj, 1e-9)) {
    std::ostringstream os;
    os << "Ad_g(Y) left span(basis) of context " << ctx.name() << "; g is not compatible:\n"
       << g.matrix;
    throw DomainError(os.str());
  }
  return AlgebraElement{ctx.from_coords(ctx.to_coords(conj))};
}

Mat detail::exp_raw(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  // Terminating-series fast path: if some power vanishes exactly, the sum
  // through that power is the exact exponential.
  Mat power = x;
  int first_zero = -1;
  std::vector<Mat> powers;
  powers.push_back(Mat::Identity(d, d));
  for (int k = 1; k <= d; ++k) {
    if (is_exactly_zero(power)) {
      first_zero = k;
      break;
    }
    powers.push_back(power);
    power = power * x;
  }
  if (first_zero < 0 && is_exactly_zero(power)) first_zero = d + 1;
  if (first_zero >= 0) {
    Mat sum = Mat::Zero(d, d);
    double factorial = 1.0;
    for (size_t k = 0; k < powers.size(); ++k) {
      if (k > 0) factorial *= static_cast<double>(k);
      sum += powers[k] / factorial;
    }
    return sum;
  }
  return x.exp();  // scaling-and-squaring with Pade approximants
}

GroupElement exponential(const LieContext& ctx, const AlgebraElement& x) {
  require_in_span(ctx, x.matrix, "exponential argument");
  return GroupElement{detail::exp_raw(x.matrix)};
}

namespace {

Mat chart_point(const LieContext& ctx, const Mat& x) {
  if (x.rows() != ctx.dim() || x.cols() != ctx.dim()) {
    throw ArgumentError("chart point has wrong shape in context " + ctx.name());
  }
  if (op_norm(x) >= ctx.chart_radius()) {
    throw DomainError("chart point lies outside the radius-" +
                      std::to_string(ctx.chart_radius()) + " ball of context " + ctx.name());
  }
  return Mat::Identity(ctx.dim(), ctx.dim()) + x;
}

}  // namespace

Mat chart_omega(const LieContext& ctx, const Mat& x, const Mat& X) {
  return X * invert(chart_point(ctx, x));
}

Mat chart_omega_inv(const LieContext& ctx, const Mat& x, const Mat& X) {
  return X * chart_point(ctx, x);
}

}  // namespace prodint
