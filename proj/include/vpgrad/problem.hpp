#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vpgrad/matrix.hpp"
#include "vpgrad/matrix_io.hpp"
#include "vpgrad/rng.hpp"
#include "vpgrad/structure.hpp"

namespace vpgrad {

enum class ModelKind { Free, Kronecker, Exponential };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Everything needed to regenerate an instance bit-for-bit.
struct ProblemSpec {
  ModelKind model = ModelKind::Free;
  Index m = 20;       ///< free: rows of A and B
  Index n = 10;       ///< columns of A (0: model default)
  Index r = 4;        ///< free: columns of B
  Index base_n = 2;   ///< kronecker: length of p_i, q_i
  Index pairs = 2;    ///< kronecker: R
  Index k_rows = 8;   ///< exponential: K
  Index l_cols = 2;   ///< exponential: L
  std::uint64_t seed = 42;
  double noise = 0.0;
  std::optional<std::string> a_path;

  Index rows() const;
  Index factor_cols() const;
  Index data_cols() const;
};

struct Instance {
  std::unique_ptr<ParamModel> model;
  DenseMatrix a;
  EntryKind a_kind = EntryKind::Complex;
  /// σ* the data was planted from; empty for free-model instances.
  std::vector<double> planted_sigma;
  /// Generator positioned after the instance draws; used for starts.
  Xorshift64Star rng{1};
};

/// Draw order: free models fill A directly. Structured models draw σ*, then
/// C (n×r), then E (m×n), and set A = B(σ*)·Cᴴ + noise·E. Kronecker
/// instances are real. All draws are uniform on [−1, 1). With an explicit A
/// path the file is read instead and only the model is derived from spec.
Instance generate_instance(const ProblemSpec& spec);

/// k draws on [−1, 1) from the instance stream.
std::vector<double> draw_sigma(Instance& inst);


}  // namespace vpgrad
