#include "prodint/matrix.hpp"

#include <Eigen/SVD>

#include "prodint/errors.hpp"

namespace prodint {

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (is_exactly_zero(m)) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double rel_error(const Mat& a, const Mat& b) {
  return op_norm(a - b) / std::max(1.0, op_norm(b));
}

Mat invert(const Mat& m) {
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) {
    throw InversionError("matrix is numerically singular, cannot invert");
  }
  return lu.inverse();
}

}  // namespace prodint
