#pragma once

#include <Eigen/Dense>

namespace prodint {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Largest singular value.
double op_norm(const Mat& m);

/// Frobenius norm.
inline double fro_norm(const Mat& m) { return m.norm(); }

/// Largest absolute entry.
inline double max_norm(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// ||a - b||_op / max(1, ||b||_op): the comparison metric used by the
/// identity suites.
double rel_error(const Mat& a, const Mat& b);

inline bool is_exactly_zero(const Mat& m) { return (m.array() == 0.0).all(); }

/// Matrix commutator a*b - b*a.
inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

/// Inverse via full-pivot LU; throws if the matrix is numerically singular.
Mat invert(const Mat& m);

}  // namespace prodint
