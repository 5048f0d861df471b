#pragma once

#include "hiapem/types.hpp"

#include <cstdint>
#include <random>

namespace hiapem {

/// Deterministic random source for instance generation.
///
/// The engine is std::mt19937_64, whose integer stream is fixed by the C++
/// standard, so a seed identifies one instance everywhere. Doubles are
/// derived here with explicit arithmetic (53-bit mantissa mapping and
/// Box-Muller) instead of std::*_distribution, whose output sequences are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw (Box-Muller, pairs cached).
  double normal();

  Vec uniform_vec(Index n, double lo, double hi);
  Vec normal_vec(Index n);
  Mat normal_mat(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hiapem
