#pragma once

#include <cmath>
#include <cstdint>

#include "vpgrad/matrix.hpp"
#include "vpgrad/rng.hpp"

namespace vpgrad::testing {

struct Pair {
  DenseMatrix a;
  DenseMatrix b;
};

// A (m×n) then B (m×r) from one stream.
inline Pair random_pair(std::uint64_t seed, Index m, Index n, Index r, bool complex_entries = true) {
  Xorshift64Star rng(seed);
  DenseMatrix a = random_matrix(rng, m, n, complex_entries);
  DenseMatrix b = random_matrix(rng, m, r, complex_entries);
  return {std::move(a), std::move(b)};
}

// Columns that share a dominant direction: b_i = v + eps·w_i.
inline DenseMatrix near_collinear(std::uint64_t seed, Index m, Index r, double eps) {
  Xorshift64Star rng(seed);
  DenseMatrix v = random_matrix(rng, m, 1);
  DenseMatrix w = random_matrix(rng, m, r);
  DenseMatrix b(m, r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < m; ++i) b(i, j) = v(i, 0) + eps * w(i, j);
  }
  return b;
}

inline double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

}  // namespace vpgrad::testing
