#pragma once

#include <cstdint>
#include <random>

#include "prodint/matrix.hpp"

namespace prodint {

/// Deterministic random source. Draws are generated from raw mt19937_64
/// output so that streams are reproducible across standard library
/// implementations (std::*_distribution is not portable).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  /// Matrix with independent standard normal entries.
  Mat matrix(int rows, int cols);

  /// Derived generator for an independent, reproducible substream.
  Rng fork(uint64_t salt) { return Rng(bits() ^ (0x9e3779b97f4a7c15ull * (salt + 1))); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace prodint
