#include "prodint/seminorm.hpp"

#include <cmath>

#include "prodint/errors.hpp"
#include "prodint/rng.hpp"

namespace prodint {

SeminormFamily SeminormFamily::standard(int dim) {
  SeminormFamily fam;
  fam.add({"op", [](const Mat& m) { return op_norm(m); }, 1.0});
  fam.add({"fro", [](const Mat& m) { return fro_norm(m); }, 1.0});
  fam.add({"max", [](const Mat& m) { return max_norm(m); }, 1.0});
  // op <= fro and max <= op hold for every matrix.
  fam.declare_domination("op", "fro");
  fam.declare_domination("max", "op");
  fam.validate(dim);
  return fam;
}

void SeminormFamily::add(Seminorm s) {
  if (contains(s.id)) throw ArgumentError("duplicate seminorm id: " + s.id);
  if (s.scale <= 0.0) throw ArgumentError("seminorm scale must be positive: " + s.id);
  norms_.push_back(std::move(s));
}

void SeminormFamily::declare_domination(const std::string& smaller, const std::string& larger) {
  if (!contains(smaller) || !contains(larger)) {
    throw ArgumentError("domination declares unknown seminorm: " + smaller + " <= " + larger);
  }
  dominations_.emplace_back(smaller, larger);
}

bool SeminormFamily::contains(const std::string& id) const {
  for (const auto& n : norms_)
    if (n.id == id) return true;
  return false;
}

const Seminorm& SeminormFamily::at(const std::string& id) const {
  for (const auto& n : norms_)
    if (n.id == id) return n;
  throw ArgumentError("unknown seminorm id: " + id);
}

Seminorm SeminormFamily::scaled(const std::string& id, double factor) const {
  if (factor <= 0.0) throw ArgumentError("seminorm scale must be positive");
  const Seminorm& base = at(id);
  Seminorm s = base;
  s.id = id;  // identity is (base id, total scale)
  s.scale = base.scale * factor;
  return s;
}

void SeminormFamily::validate(int dim, uint64_t seed, int samples) const {
  Rng rng(seed);
  const double tol = 1e-10;
  for (int k = 0; k < samples; ++k) {
    const Mat a = rng.matrix(dim, dim);
    const Mat b = rng.matrix(dim, dim);
    const double lambda = rng.uniform(-3.0, 3.0);
    for (const auto& n : norms_) {
      const double na = n(a);
      if (std::abs(n(lambda * a) - std::abs(lambda) * na) > tol * std::max(1.0, na)) {
        throw DomainError("seminorm " + n.id + " is not absolutely homogeneous");
      }
      if (n(a + b) > n(a) + n(b) + tol * std::max(1.0, n(a) + n(b))) {
        throw DomainError("seminorm " + n.id + " violates the triangle inequality");
      }
    }
    for (const auto& [small_id, large_id] : dominations_) {
      if (at(small_id)(a) > at(large_id)(a) * (1.0 + tol)) {
        throw DomainError("declared domination " + small_id + " <= " + large_id +
                          " fails on a sample");
      }
    }
  }
}

double seminorm_eval(const SeminormFamily& fam, const std::string& id, const Mat& x) {
  return fam.at(id)(x);
}

}  // namespace prodint
