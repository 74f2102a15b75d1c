#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vpgrad/adjoint.hpp"
#include "vpgrad/solve.hpp"

namespace vpgrad {

struct BenchCell {
  Index m = 0;
  Index n = 0;
  Index r = 0;
};

/// Parses "m,n,r;m,n,r" (also accepts 'x' between sizes).
std::vector<BenchCell> parse_grid(const std::string& text);

struct BenchRecord {
  std::string kind;  ///< "gradient" or "solve"
  std::string method;
  Index m = 0;
  Index n = 0;
  Index r = 0;
  std::uint64_t flops = 0;
  std::uint64_t words = 0;           ///< account_words for the method
  std::uint64_t measured_words = 0;  ///< allocation tracker peak; 0 when not measured
  std::int64_t elapsed_ns = 0;       ///< median over repeats
  bool extrapolated = false;         ///< FD timed as one forward pass × 4mr
  int repeats = 0;
  int iterations = -1;
  std::string termination;
  std::string error;
};

struct BenchOptions {
  std::vector<BenchCell> grid;
  std::vector<GradientMethod> methods{GradientMethod::Fd, GradientMethod::Ags, GradientMethod::Amgs};
  int repeats = 3;
  std::uint64_t seed = 42;
  /// FD runs directly only while m·r is at most this; beyond it, extrapolated.
  Index fd_direct_limit = 512;
  /// Solve benchmark: cells are (n², n, R) Kronecker problems.
  bool solve = false;
  double noise = 0.0;
  SolveOptions solve_options;
};

/// Runs every (cell, method) pair. Failures are recorded in the record's
/// `error` field and the run continues. `sink` sees records as they finish.
std::vector<BenchRecord> run_bench(const BenchOptions& opts,
                                   const std::function<void(const BenchRecord&)>& sink = {});

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records);
void write_bench_json(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace vpgrad
