#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prodint/matrix.hpp"

namespace prodint {

/// Group membership predicates, tagged so context files can name them.
enum class MembershipTag {
  Invertible,          // det != 0
  UnitDeterminant,     // det == 1
  Orthogonal,          // g^T g == 1
  Unitriangular,       // upper triangular, unit diagonal
  DiagonalInvertible,  // diagonal, det != 0
};

std::string to_string(MembershipTag tag);
MembershipTag membership_from_string(const std::string& s);

struct AlgebraElement {
  Mat matrix;
};

struct GroupElement {
  Mat matrix;
};

/// A matrix Lie group/algebra instance: the algebra is the span of `basis`
/// inside d x d matrices, the group is cut out by the membership predicate,
/// and the chart is g |-> g - 1 on the operator-norm ball of radius
/// `chart_radius` around the identity.
class LieContext {
 public:
  LieContext(std::string name, int dim, std::vector<Mat> basis, MembershipTag membership,
             double chart_radius = 0.9, std::optional<int> nilpotency_class = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int algebra_dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }
  MembershipTag membership() const { return membership_; }
  double chart_radius() const { return chart_radius_; }
  std::optional<int> nilpotency_class() const { return nilpotency_class_; }

  Mat zero() const { return Mat::Zero(dim_, dim_); }
  Mat identity() const { return Mat::Identity(dim_, dim_); }

  /// Coordinates of m in the basis (least squares); no residual check.
  Vec to_coords(const Mat& m) const;
  Mat from_coords(const Vec& coords) const;

  /// Max-norm distance between m and its projection onto span(basis).
  double span_residual(const Mat& m) const;
  bool in_span(const Mat& m, double tol = 1e-12) const;

  /// Validating factories. Inputs farther than 1e-12 (relative, max norm)
  /// from the span are rejected rather than silently projected.
  AlgebraElement algebra(const Mat& m) const;
  GroupElement group(const Mat& m) const;

  bool is_member(const Mat& g, double tol = 1e-9) const;

  /// Membership defect: 0 when g satisfies the predicate exactly.
  double membership_defect(const Mat& g) const;

  /// The ambient general linear context gl(dim). Chart-based constructions
  /// (straight lines in the chart) leave embedded subgroups; they are run in
  /// the ambient context, where every invertible matrix is a group member.
  LieContext ambient() const;

 private:
  std::string name_;
  int dim_;
  std::vector<Mat> basis_;
  MembershipTag membership_;
  double chart_radius_;
  std::optional<int> nilpotency_class_;

  Eigen::MatrixXd basis_flat_;  // dim^2 x algebra_dim
  Eigen::ColPivHouseholderQR<Mat> basis_qr_;

  void check_closure() const;
  void check_nilpotency() const;
};

/// Built-in desk-scale instances.
LieContext heisenberg3();                  // strictly upper triangular 3x3, class 2
LieContext so3();                          // rotation generators
LieContext gl(int n);                      // full matrix algebra
LieContext diagonal(int n);                // abelian diagonal subalgebra of gl(n)
LieContext context_by_name(const std::string& name);

/// Context definition files. Decimal round-trip at 17 significant digits;
/// bit-exactness is not required.
std::string context_to_json(const LieContext& ctx);
LieContext context_from_json(const std::string& text);
LieContext load_context_file(const std::string& path);
void save_context_file(const LieContext& ctx, const std::string& path);

}  // namespace prodint
