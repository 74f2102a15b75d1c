#pragma once

// Explicit assembly of the block lower-triangular system that links the
// derivatives of every intermediate vector of the MGS recurrence, and its
// transposed solve. Only feasible for tiny m and r; used as an independent
// oracle for the reverse sweep.
//
// Nodes, in order: b_1..b_r, then for each column i the deflated vectors
// u_{1i}..u_{i-1,i} followed by q_i. Every block row carries an implicit
// identity on its own node plus at most two off-diagonal blocks:
//   q_i    : S = −(I − q_i q_iᴴ)/‖t_i‖ on the last deflated vector
//   u_{ji} : W = q_j q_jᴴ − I on the previous vector, V on q_j with
//            V·x = (q_jᴴ t)·x + q_j·conj(tᴴx)
// V and S are only real-linear, so every block is stored as a 2m×2m real
// matrix acting on [Re x; Im x].

#include <cstddef>
#include <string>
#include <vector>

#include "vpgrad/adjoint.hpp"
#include "vpgrad/matrix.hpp"

namespace vpgrad {

inline constexpr Index kBlockSystemMaxRows = 8;
inline constexpr Index kBlockSystemMaxCols = 4;

enum class BlockKind { S, V, W };

struct BlockNode {
  enum class Role { Input, Deflated, Orthonormal };
  Role role;
  Index column;  ///< 0-based column i of B the node belongs to
  Index step;    ///< for Deflated: 0-based j of the q_j deflated against
  std::string label;
};

struct Block {
  Index row;  ///< node index
  Index col;  ///< node index, always < row
  BlockKind kind;
  std::vector<double> entries;  ///< 2m×2m row-major
};

class BlockSystem {
 public:
  /// Runs the forward MGS recurrence and assembles [F, L] and the final
  /// row. Throws SizeCap beyond m = 8 or r = 4.
  static BlockSystem assemble(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts = {});

  /// Back substitution on the transposed system; returns the m×r gradient
  /// panel under the usual pairing convention.
  DenseMatrix solve_gradient() const;

  const std::vector<BlockNode>& nodes() const { return nodes_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  double f() const { return f_; }
  /// Complex words held by blocks, final row and solution vector.
  std::size_t stored_words() const;

 private:
  Index m_ = 0;
  Index r_ = 0;
  double f_ = 0.0;
  std::vector<BlockNode> nodes_;
  std::vector<Block> blocks_;
  std::vector<std::vector<double>> final_row_;  ///< per node, ∂f/∂node realified (empty if none)
};

DenseMatrix gradient_blocksystem(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts = {});

}  // namespace vpgrad
