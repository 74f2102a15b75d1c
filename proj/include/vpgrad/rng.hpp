#pragma once

#include <cstdint>

#include "vpgrad/matrix.hpp"

namespace vpgrad {

/// xorshift64*. Draws are mapped to [−1, 1) via the top 53 bits so that
/// instances are reproducible across implementations.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next_u64() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 2685821657736338717ULL;
  }

  /// Uniform on [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on [−1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  std::uint64_t state() const { return state_; }

  // The all-zero state is a fixed point of xorshift.
  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

 private:
  std::uint64_t state_;
};

/// Column-major fill; complex entries draw the real part, then the imaginary
/// part. Real fills leave the imaginary parts at zero.
inline DenseMatrix random_matrix(Xorshift64Star& rng, Index rows, Index cols, bool complex_entries = true) {
  DenseMatrix x(rows, cols);
  for (auto& v : x.values()) {
    const double re = rng.next_symmetric();
    const double im = complex_entries ? rng.next_symmetric() : 0.0;
    v = Complex(re, im);
  }
  return x;
}

}  // namespace vpgrad
