#include "prodint/context.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prodint/errors.hpp"

namespace prodint {

namespace {

std::string describe(const Mat& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

Vec flatten(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

std::string to_string(MembershipTag tag) {
  switch (tag) {
    case MembershipTag::Invertible: return "invertible";
    case MembershipTag::UnitDeterminant: return "unit-determinant";
    case MembershipTag::Orthogonal: return "orthogonal";
    case MembershipTag::Unitriangular: return "unitriangular";
    case MembershipTag::DiagonalInvertible: return "diagonal-invertible";
  }
  throw ArgumentError("unknown membership tag");
}

MembershipTag membership_from_string(const std::string& s) {
  if (s == "invertible") return MembershipTag::Invertible;
  if (s == "unit-determinant") return MembershipTag::UnitDeterminant;
  if (s == "orthogonal") return MembershipTag::Orthogonal;
  if (s == "unitriangular") return MembershipTag::Unitriangular;
  if (s == "diagonal-invertible") return MembershipTag::DiagonalInvertible;
  throw ArgumentError("unknown membership tag: " + s);
}

LieContext::LieContext(std::string name, int dim, std::vector<Mat> basis, MembershipTag membership,
                       double chart_radius, std::optional<int> nilpotency_class)
    : name_(std::move(name)),
      dim_(dim),
      basis_(std::move(basis)),
      membership_(membership),
      chart_radius_(chart_radius),
      nilpotency_class_(nilpotency_class) {
  if (dim_ <= 0) throw ArgumentError("context dim must be positive");
  if (basis_.empty()) throw ArgumentError("context needs a nonempty basis");
  if (chart_radius_ <= 0.0) throw ArgumentError("chart_radius must be positive");
  if (nilpotency_class_ && *nilpotency_class_ <= 0) {
    throw ArgumentError("nilpotency_class must be positive when present");
  }
  for (const auto& b : basis_) {
    if (b.rows() != dim_ || b.cols() != dim_) {
      throw ArgumentError("basis matrix has wrong shape in context " + name_);
    }
  }
  basis_flat_.resize(dim_ * dim_, static_cast<Eigen::Index>(basis_.size()));
  for (size_t j = 0; j < basis_.size(); ++j) basis_flat_.col(static_cast<Eigen::Index>(j)) = flatten(basis_[j]);
  basis_qr_ = Eigen::ColPivHouseholderQR<Mat>(basis_flat_);
  if (basis_qr_.rank() != static_cast<Eigen::Index>(basis_.size())) {
    throw ArgumentError("basis matrices are linearly dependent in context " + name_);
  }
  check_closure();
  check_nilpotency();
}

void LieContext::check_closure() const {
  for (const auto& x : basis_) {
    for (const auto& y : basis_) {
      const Mat b = commutator(x, y);
      if (span_residual(b) > 1e-12 * std::max(1.0, max_norm(b))) {
        throw DomainError("bracket of basis elements leaves span(basis) in context " + name_);
      }
    }
  }
}

void LieContext::check_nilpotency() const {
  if (!nilpotency_class_) return;
  const int c = *nilpotency_class_;
  // Chains of basis elements of length exactly c must vanish; multilinearity
  // extends this to the whole algebra.
  std::vector<size_t> idx(static_cast<size_t>(c), 0);
  const size_t k = basis_.size();
  while (true) {
    for (size_t j = 0; j < k; ++j) {
      Mat acc = basis_[j];
      for (int p = c - 1; p >= 0; --p) acc = commutator(basis_[idx[static_cast<size_t>(p)]], acc);
      if (!is_exactly_zero(acc)) {
        throw DomainError("declared nilpotency class " + std::to_string(c) +
                          " fails on a basis chain in context " + name_);
      }
    }
    int p = c - 1;
    while (p >= 0 && ++idx[static_cast<size_t>(p)] == k) idx[static_cast<size_t>(p--)] = 0;
    if (p < 0) break;
  }
}

Vec LieContext::to_coords(const Mat& m) const {
  return basis_qr_.solve(flatten(m));
}

Mat LieContext::from_coords(const Vec& coords) const {
  Vec flat = basis_flat_ * coords;
  return Eigen::Map<const Mat>(flat.data(), dim_, dim_);
}

double LieContext::span_residual(const Mat& m) const {
  const Vec coords = to_coords(m);
  return max_norm(from_coords(coords) - m);
}

bool LieContext::in_span(const Mat& m, double tol) const {
  return span_residual(m) <= tol * std::max(1.0, max_norm(m));
}

AlgebraElement LieContext::algebra(const Mat& m) const {
  if (m.rows() != dim_ || m.cols() != dim_) {
    throw ArgumentError("algebra element has wrong shape in context " + name_);
  }
  if (!in_span(m)) {
    throw DomainError("matrix is not in span(basis) of context " + name_ + ":\n" + describe(m));
  }
  return AlgebraElement{m};
}

GroupElement LieContext::group(const Mat& m) const {
  if (m.rows() != dim_ || m.cols() != dim_) {
    throw ArgumentError("group element has wrong shape in context " + name_);
  }
  if (!is_member(m)) {
    throw DomainError("matrix violates the " + to_string(membership_) +
                      " membership predicate of context " + name_ + ":\n" + describe(m));
  }
  return GroupElement{m};
}

double LieContext::membership_defect(const Mat& g) const {
  switch (membership_) {
    case MembershipTag::Invertible:
      return 0.0;  // handled by the determinant guard in is_member
    case MembershipTag::UnitDeterminant:
      return std::abs(g.determinant() - 1.0);
    case MembershipTag::Orthogonal:
      return max_norm(g.transpose() * g - Mat::Identity(dim_, dim_));
    case MembershipTag::Unitriangular: {
      double d = 0.0;
      for (int i = 0; i < dim_; ++i) {
        d = std::max(d, std::abs(g(i, i) - 1.0));
        for (int j = 0; j < i; ++j) d = std::max(d, std::abs(g(i, j)));
      }
      return d;
    }
    case MembershipTag::DiagonalInvertible: {
      double d = 0.0;
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          if (i != j) d = std::max(d, std::abs(g(i, j)));
      return d;
    }
  }
  throw ArgumentError("unknown membership tag");
}

bool LieContext::is_member(const Mat& g, double tol) const {
  if (std::abs(g.determinant()) < 1e-14) return false;
  return membership_defect(g) <= tol;
}

LieContext LieContext::ambient() const {
  if (membership_ == MembershipTag::Invertible && algebra_dim() == dim_ * dim_) return *this;
  return gl(dim_);
}

namespace {

Mat unit(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

LieContext heisenberg3() {
  std::vector<Mat> basis = {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)};
  return LieContext("heisenberg3", 3, std::move(basis), MembershipTag::Unitriangular, 0.9, 2);
}

LieContext so3() {
  Mat lx = Mat::Zero(3, 3), ly = Mat::Zero(3, 3), lz = Mat::Zero(3, 3);
  lx(1, 2) = -1.0; lx(2, 1) = 1.0;
  ly(0, 2) = 1.0;  ly(2, 0) = -1.0;
  lz(0, 1) = -1.0; lz(1, 0) = 1.0;
  return LieContext("so3", 3, {lx, ly, lz}, MembershipTag::Orthogonal);
}

LieContext gl(int n) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) basis.push_back(unit(n, i, j));
  return LieContext("gl" + std::to_string(n), n, std::move(basis), MembershipTag::Invertible);
}

LieContext diagonal(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i) basis.push_back(unit(n, i, i));
  return LieContext("diag" + std::to_string(n), n, std::move(basis),
                    MembershipTag::DiagonalInvertible, 0.9, 1);
}

LieContext context_by_name(const std::string& name) {
  if (name == "heisenberg3") return heisenberg3();
  if (name == "so3") return so3();
  if (name == "gl2") return gl(2);
  if (name == "gl3") return gl(3);
  if (name == "diag2") return diagonal(2);
  throw ArgumentError("unknown built-in context: " + name);
}

std::string context_to_json(const LieContext& ctx) {
  nlohmann::json j;
  j["name"] = ctx.name();
  j["dim"] = ctx.dim();
  j["membership"] = to_string(ctx.membership());
  // nlohmann serializes doubles with shortest round-trip decimals, which
  // covers the 17-significant-digit requirement.
  j["chart_radius"] = ctx.chart_radius();
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : ctx.basis()) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < b.rows(); ++i)
      for (int c = 0; c < b.cols(); ++c) row.push_back(b(i, c));
    basis.push_back(row);
  }
  j["basis"] = basis;
  if (ctx.nilpotency_class()) j["nilpotency_class"] = *ctx.nilpotency_class();
  return j.dump(2) + "\n";
}

LieContext context_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("context file is not valid JSON: ") + e.what());
  }
  try {
    const std::string name = j.at("name").get<std::string>();
    const int dim = j.at("dim").get<int>();
    const MembershipTag tag = membership_from_string(j.at("membership").get<std::string>());
    const double radius = j.value("chart_radius", 0.9);
    std::optional<int> nil;
    if (j.contains("nilpotency_class")) nil = j.at("nilpotency_class").get<int>();
    std::vector<Mat> basis;
    for (const auto& row : j.at("basis")) {
      if (static_cast<int>(row.size()) != dim * dim) {
        throw ArgumentError("basis row has wrong length in context file");
      }
      Mat b(dim, dim);
      int k = 0;
      for (int i = 0; i < dim; ++i)
        for (int c = 0; c < dim; ++c) b(i, c) = row.at(static_cast<size_t>(k++)).get<double>();
      basis.push_back(b);
    }
    return LieContext(name, dim, std::move(basis), tag, radius, nil);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("context file is missing required fields: ") + e.what());
  }
}

LieContext load_context_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open context file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return context_from_json(ss.str());
}

void save_context_file(const LieContext& ctx, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open context file for writing: " + path);
  out << context_to_json(ctx);
}

}  // namespace prodint
