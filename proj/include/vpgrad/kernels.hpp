#pragma once

// Vector kernels shared by the forward and reverse sweeps. Each call charges
// its operation count to an optional FlopCounter once, outside the loop.

#include <cmath>
#include <span>

#include "vpgrad/flops.hpp"
#include "vpgrad/matrix.hpp"

namespace vpgrad::kernels {

/// xᴴy
inline Complex dot(std::span<const Complex> x, std::span<const Complex> y, FlopCounter* fc = nullptr) {
  Complex s{};
  for (Index k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  if (fc) {
    fc->muls += x.size();
    fc->adds += x.size();
  }
  return s;
}

/// y += alpha·x
inline void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y, FlopCounter* fc = nullptr) {
  for (Index k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
  if (fc) {
    fc->muls += x.size();
    fc->adds += x.size();
  }
}

inline void scale(double alpha, std::span<Complex> x, FlopCounter* fc = nullptr) {
  for (auto& v : x) v *= alpha;
  if (fc) fc->muls += x.size();
}

inline double squared_norm(std::span<const Complex> x, FlopCounter* fc = nullptr) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  if (fc) {
    fc->muls += x.size();
    fc->adds += x.size();
  }
  return s;
}

inline double norm2(std::span<const Complex> x, FlopCounter* fc = nullptr) {
  const double s = squared_norm(x, fc);
  if (fc) ++fc->sqrts;
  return std::sqrt(s);
}

inline void copy(std::span<const Complex> x, std::span<Complex> y) {
  for (Index k = 0; k < x.size(); ++k) y[k] = x[k];
}

}  // namespace vpgrad::kernels
