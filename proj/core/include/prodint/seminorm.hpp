#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prodint/matrix.hpp"

namespace prodint {

/// A named norm together with a positive scale factor. Scalar multiples of
/// the base norms stand in for the full system of continuous seminorms: on a
/// finite-dimensional space all norms are equivalent, so finitely many
/// representatives closed under positive scaling suffice for every check.
struct Seminorm {
  std::string id;
  std::function<double(const Mat&)> fn;
  double scale = 1.0;

  double operator()(const Mat& m) const { return scale * fn(m); }
};

/// Finite ordered family of norms with declared pointwise dominations
/// (pairs v <= w). Construction samples homogeneity, the triangle
/// inequality, and the declared dominations; violations throw.
class SeminormFamily {
 public:
  SeminormFamily() = default;

  static SeminormFamily standard(int dim);

  void add(Seminorm s);
  void declare_domination(const std::string& smaller, const std::string& larger);

  bool contains(const std::string& id) const;
  const Seminorm& at(const std::string& id) const;

  /// The named norm scaled by `factor` (the "c * v" seminorms of the
  /// witness searches).
  Seminorm scaled(const std::string& id, double factor) const;

  const std::vector<Seminorm>& norms() const { return norms_; }
  const std::vector<std::pair<std::string, std::string>>& dominations() const {
    return dominations_;
  }

  /// Samples absolute homogeneity, the triangle inequality, and declared
  /// dominations on random matrices; throws DomainError on violation.
  void validate(int dim, uint64_t seed = 20240901u, int samples = 64) const;

 private:
  std::vector<Seminorm> norms_;
  std::vector<std::pair<std::string, std::string>> dominations_;
};

/// Value of the named norm; unknown id throws ArgumentError.
double seminorm_eval(const SeminormFamily& fam, const std::string& id, const Mat& x);

}  // namespace prodint
