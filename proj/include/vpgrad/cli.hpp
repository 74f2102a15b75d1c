#pragma once

// Command-line surface: gen | gradcheck | bench | solve.
// Exit codes: 0 success, 1 tolerance or (with --strict) convergence failure,
// 2 input, shape or I/O errors.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vpgrad/adjoint.hpp"
#include "vpgrad/bench.hpp"
#include "vpgrad/problem.hpp"
#include "vpgrad/solve.hpp"

namespace vpgrad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Writes A to `out_path` and, for planted instances, σ* to
/// `out_path + ".sigma"` (k×1 real).
int cmd_gen(const ProblemSpec& spec, const std::string& out_path, std::ostream& log);

struct GradcheckOptions {
  std::vector<GradientMethod> methods{GradientMethod::Amgs};
  GradientMethod reference = GradientMethod::Fd;
  double tol = 1e-6;
  double fd_step = 1e-6;
  /// Test hook: every checked (non-reference) gradient is scaled by 1+corrupt.
  double corrupt = 0.0;
};

int cmd_gradcheck(const ProblemSpec& spec, const GradcheckOptions& opts, std::ostream& out);

enum class OutputFormat { Csv, Json };

int cmd_bench(const BenchOptions& opts, OutputFormat format, const std::optional<std::string>& out_path,
              std::ostream& out);

nlohmann::json report_to_json(const SolveReport& report, const ProblemSpec& spec);

int cmd_solve(const ProblemSpec& spec, const SolveOptions& opts, bool strict,
              const std::optional<std::string>& out_path, std::ostream& out);

/// Full argument parsing and dispatch; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vpgrad::cli
