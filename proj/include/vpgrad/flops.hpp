#pragma once

#include <cstdint>

namespace vpgrad {

/// Operation counts at complex granularity: a complex (or mixed real/complex)
/// multiply is one mul, an add or subtract is one add. `total()` is the
/// two-operand operation count used for the complexity figures; `real_flops()`
/// converts with 6 real flops per complex multiply and 2 per add.
struct FlopCounter {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t divs = 0;
  std::uint64_t sqrts = 0;

  std::uint64_t total() const { return adds + muls + divs + sqrts; }
  std::uint64_t real_flops() const { return 2 * adds + 6 * muls + 6 * divs + sqrts; }
  void reset() { *this = FlopCounter{}; }

  FlopCounter& operator+=(const FlopCounter& o) {
    adds += o.adds;
    muls += o.muls;
    divs += o.divs;
    sqrts += o.sqrts;
    return *this;
  }
};

}  // namespace vpgrad
