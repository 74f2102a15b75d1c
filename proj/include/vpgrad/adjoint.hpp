#pragma once

// Gradient of f(B) = sqrt(‖A‖²_F − ‖AᴴQ(B)‖²_F) with respect to every entry of
// B.
//
// Pairing convention: f is real and B complex, so the gradient panel stores
//   G_ij = ∂f/∂Re(b_ij) + i·∂f/∂Im(b_ij),
// i.e. df = Re Σ conj(G_ij)·db_ij. Under this convention the reverse sweep is
// exactly the published recurrence (initializer −(1/f)·A·(AᴴQ), then
// g_i ← (g_i − q_i q_iᴴ g_i)/‖t_i‖, g_j ← g_j − conj(z_j)·g_i − conj(α)·t_j,
// g_i ← g_i − α·q_j) with no extra factor of 2 or conjugation. The
// normalization adjoint is strictly (g − q·Re(qᴴg))/‖t‖; the printed form
// drops the Re, which is harmless because f is invariant under a phase change
// of any column, so qᴴg is real for the accumulated adjoint. The
// finite-difference tests pin this down.

#include <cstdint>
#include <string_view>
#include <vector>

#include "vpgrad/flops.hpp"
#include "vpgrad/matcore.hpp"
#include "vpgrad/matrix.hpp"

namespace vpgrad {

/// f fell below the gradient guard; the 1/f factor would amplify noise.
class ObjectiveNearZero : public std::runtime_error {
 public:
  ObjectiveNearZero(double f, double threshold)
      : std::runtime_error("objective " + std::to_string(f) + " is below the gradient guard " +
                           std::to_string(threshold)),
        f_(f),
        threshold_(threshold) {}
  double f() const { return f_; }
  double threshold() const { return threshold_; }

 private:
  double f_;
  double threshold_;
};

/// The explicit block system only fits in memory for tiny problems.
class SizeCap : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GradientMethod { Fd, Ags, Amgs, BlockSystem };

std::string_view to_string(GradientMethod method);
GradientMethod parse_gradient_method(std::string_view name);

struct GradientOptions {
  double rank_tol = kDefaultRankTol;
  /// Gradient refused when f <= objective_guard·‖A‖_F.
  double objective_guard = 1e-10;
  /// Finite-difference base step; the step for coordinate x is fd_step·(1+|x|).
  double fd_step = 1e-6;
};

struct GradientResult {
  double f = 0.0;
  DenseMatrix g;             ///< m×r gradient panel, pairing convention above
  std::uint64_t flops = 0;   ///< FlopCounter::total() for the whole call
  FlopCounter counts;
  std::uint64_t words = 0;   ///< peak tracked workspace, complex words
};

/// The four m×r panels B, Q, T, G and the length-r buffer Z. Everything the
/// AMGS sweep touches besides A and scalars lives here.
struct GradientWorkspace {
  GradientWorkspace(const DenseMatrix& b_in, AllocationTracker* tracker);

  DenseMatrix b;
  DenseMatrix q;
  DenseMatrix t;
  DenseMatrix g;
  TrackedVector<Complex> z;
};

/// Reverse-mode MGS with per-column recomputation of the deflation trajectory.
GradientResult gradient_amgs(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts = {});

/// Classical Gram-Schmidt forward pass and its reverse sweep. Workspace is
/// B, Q, G and the packed R triangle.
GradientResult gradient_ags(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts = {});

/// Central differences over every real coordinate of B (4mr forward
/// evaluations). Result uses the same pairing convention as the analytic
/// routes. Never raises ObjectiveNearZero.
GradientResult gradient_fd(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts = {});

/// Dispatches on `method`; BlockSystem goes through the explicit block
/// triangular solve (see blocksystem.hpp).
GradientResult compute_gradient(GradientMethod method, const DenseMatrix& a, const DenseMatrix& b,
                                const GradientOptions& opts = {});

/// Analytic peak workspace, in complex words, of each method as implemented:
///   AMGS      4mr + r
///   AGS       3mr + r(r+1)/2
///   FD        mr + r
///   BLOCKSYS  2m²r² + mr(r+5)/2
std::uint64_t account_words(GradientMethod method, std::uint64_t m, std::uint64_t n, std::uint64_t r);

/// The published operation count of the AMGS gradient, 4mr(2r+n).
inline std::uint64_t amgs_reference_flops(std::uint64_t m, std::uint64_t n, std::uint64_t r) {
  return 4 * m * r * (2 * r + n);
}

}  // namespace vpgrad
