#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vpgrad/adjoint.hpp"
#include "vpgrad/structure.hpp"

namespace vpgrad {

enum class Termination { GradTol, StepTol, IterCap, ObjectiveNearZero, RankDeficient };

std::string_view to_string(Termination t);

struct SolveOptions {
  int max_iters = 5000;
  double grad_tol = 1e-8;  ///< on ‖∂f/∂σ‖∞
  double step_tol = 1e-12; ///< on ‖σ_{t+1} − σ_t‖∞ / (1 + ‖σ_t‖∞)
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 30;
  /// The approximation is reset when the secant denominator
  /// |(s − Hy)ᵀy| <= update_guard·‖s‖².
  double update_guard = 1e-12;
  /// Secant iteration on ∇(f²/2) = f·∇f instead of ∇f. Same minimizers;
  /// unlike ∇f it stays smooth and vanishes at exact fits, where f itself is
  /// cone-shaped. Line search then uses f²/2 as the merit, with f taken
  /// from the explicit residual ‖A − QQᴴA‖_F: near an exact fit the
  /// subtraction form cannot resolve the decrease.
  bool squared_merit = true;
  GradientMethod method = GradientMethod::Amgs;
  GradientOptions gradient;
};

struct SolveReport {
  int iterations = 0;
  Termination termination = Termination::IterCap;
  std::vector<double> f_history;      ///< f at σ0 and after every accepted step
  std::vector<double> step_lengths;   ///< α of every accepted step
  std::vector<double> slopes;         ///< (merit gradient)ᵀd of every accepted step
  std::vector<double> final_sigma;
  double final_f = 0.0;
  double final_grad_norm = 0.0;  ///< ‖∂f/∂σ‖∞ at final_sigma (0 when unavailable)
  int restarts = 0;
  int evaluations = 0;
  std::string error;  ///< set when termination is RankDeficient
  SolveOptions options;
};

/// Inverse of the secant approximation to the Jacobian of the gradient map.
class BroydenState {
 public:
  explicit BroydenState(std::size_t dim) : dim_(dim), h_(dim * dim, 0.0) {}

  /// Reset to (1/‖g‖₂)·I, i.e. the Jacobian approximation ‖g‖₂·I.
  void reset(std::span<const double> grad);
  /// d = −H·g
  std::vector<double> direction(std::span<const double> grad) const;
  /// Symmetric rank-one secant update H += wwᵀ/(wᵀy), w = s − Hy.
  /// Skipped when w is negligible against y; a degenerate denominator
  /// otherwise resets H to scaled identity and returns false.
  bool update(std::span<const double> s, std::span<const double> y, std::span<const double> grad, double guard);

  int restarts() const { return restarts_; }
  std::span<const double> inverse_jacobian() const { return h_; }

 private:
  std::size_t dim_;
  std::vector<double> h_;
  int restarts_ = 0;
};

/// Restart rule: reset when the secant denominator is degenerate or the
/// current direction is not a descent direction for `grad`. Returns true
/// when a reset happened.
bool restart_policy(BroydenState& state, std::span<const double> grad, std::span<const double> direction);

/// Broyden quasi-Newton on the merit gradient (∂f/∂σ, or f·∂f/∂σ with
/// squared_merit) with Armijo backtracking on the merit. Accepted steps
/// satisfy merit(σ + αd) <= merit(σ) + armijo·α·slope.
SolveReport broyden_minimize(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma0,
                             const SolveOptions& opts = {});

}  // namespace vpgrad
