#pragma once

#include <cmath>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/matrix.hpp"
#include "prodint/rng.hpp"

namespace prodint::testing {

inline Mat unit(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

/// Rodrigues rotation matrix about a unit axis, the closed-form oracle for
/// so(3) exponentials.
inline Mat rodrigues(double ax, double ay, double az, double theta) {
  Mat k = Mat::Zero(3, 3);
  k(0, 1) = -az; k(0, 2) = ay;
  k(1, 0) = az;  k(1, 2) = -ax;
  k(2, 0) = -ay; k(2, 1) = ax;
  return Mat::Identity(3, 3) + std::sin(theta) * k + (1.0 - std::cos(theta)) * (k * k);
}

/// skew(v) so that skew(v) w = v x w; the so3 basis is skew(e_x), skew(e_y),
/// skew(e_z).
inline Mat skew(double x, double y, double z) {
  Mat m = Mat::Zero(3, 3);
  m(0, 1) = -z; m(0, 2) = y;
  m(1, 0) = z;  m(1, 2) = -x;
  m(2, 0) = -y; m(2, 1) = x;
  return m;
}

inline Mat random_algebra(Rng& rng, const LieContext& ctx, double op_bound = 1.0) {
  Vec coords(ctx.algebra_dim());
  for (int i = 0; i < ctx.algebra_dim(); ++i) coords(i) = rng.normal();
  Mat m = ctx.from_coords(coords);
  const double n = op_norm(m);
  if (n > 0.0) m *= op_bound / n;
  return m;
}

}  // namespace prodint::testing
