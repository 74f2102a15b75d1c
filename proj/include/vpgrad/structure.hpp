#pragma once

// Structured factors B(σ) with real parameters σ, and the chain rule that
// turns the entrywise gradient panel G into ∂f/∂σ:
//   ∂f/∂σ_l = Σ_ij Re(conj(G_ij) · ∂b_ij/∂σ_l).

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "vpgrad/adjoint.hpp"
#include "vpgrad/matrix.hpp"

namespace vpgrad {

class ParamModel {
 public:
  virtual ~ParamModel() = default;

  virtual std::string_view kind() const = 0;
  virtual Index num_params() const = 0;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  /// True when B(σ) is real for every σ.
  virtual bool real_valued() const = 0;

  virtual DenseMatrix build(std::span<const double> sigma) const = 0;
  /// Directional derivative of build at σ along v.
  virtual DenseMatrix tangent(std::span<const double> sigma, std::span<const double> v) const = 0;
  /// Transpose of `tangent` under the real pairing Re⟨·,·⟩.
  virtual std::vector<double> adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const = 0;

 protected:
  void check_sigma(std::span<const double> sigma, const char* what) const;
  void check_panel(const DenseMatrix& g, const char* what) const;
};

/// Column i is p_i ⊗ q_i, entry a·n + β equal to p_a·q_β (0-based).
/// σ = [p_1, q_1, ..., p_R, q_R], so k = 2nR, m = n², r = R.
class KroneckerModel final : public ParamModel {
 public:
  KroneckerModel(Index base_n, Index pairs);

  std::string_view kind() const override { return "kronecker"; }
  Index num_params() const override { return 2 * n_ * pairs_; }
  Index rows() const override { return n_ * n_; }
  Index cols() const override { return pairs_; }
  bool real_valued() const override { return true; }
  Index base_n() const { return n_; }

  DenseMatrix build(std::span<const double> sigma) const override;
  DenseMatrix tangent(std::span<const double> sigma, std::span<const double> v) const override;
  std::vector<double> adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const override;

 private:
  Index n_;
  Index pairs_;
};

/// Entry (k, l) is exp(i·σ_kl); σ is stored column-major (index l·K + k).
///
/// The exponential factor of the harmonic model multiplies the free
/// amplitudes from the right. Conjugate-transposing the fit puts it in the
/// structured B slot, so callers pass Aᴴ as the data matrix when their
/// samples are laid out the other way round.
class ExponentialModel final : public ParamModel {
 public:
  ExponentialModel(Index rows, Index cols);

  std::string_view kind() const override { return "exponential"; }
  Index num_params() const override { return rows_ * cols_; }
  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  bool real_valued() const override { return false; }

  DenseMatrix build(std::span<const double> sigma) const override;
  DenseMatrix tangent(std::span<const double> sigma, std::span<const double> v) const override;
  std::vector<double> adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const override;

 private:
  Index rows_;
  Index cols_;
};

/// Every real coordinate of B is a parameter: σ[2(j·m+i)] = Re b_ij,
/// σ[2(j·m+i)+1] = Im b_ij.
class FreeModel final : public ParamModel {
 public:
  FreeModel(Index rows, Index cols);

  std::string_view kind() const override { return "free"; }
  Index num_params() const override { return 2 * rows_ * cols_; }
  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  bool real_valued() const override { return false; }

  DenseMatrix build(std::span<const double> sigma) const override;
  DenseMatrix tangent(std::span<const double> sigma, std::span<const double> v) const override;
  std::vector<double> adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const override;

  static std::vector<double> flatten(const DenseMatrix& b);

 private:
  Index rows_;
  Index cols_;
};

/// Re Σ conj(y_ij)·x_ij
double real_pairing(const DenseMatrix& x, const DenseMatrix& y);

struct ValueAndGradient {
  double f = 0.0;
  std::vector<double> grad;
  std::uint64_t flops = 0;
};

/// build → gradient (AMGS unless told otherwise) → adjoint_sigma.
ValueAndGradient value_and_gradient(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma,
                                    GradientMethod method = GradientMethod::Amgs, const GradientOptions& opts = {});

/// f(B(σ)) alone.
double value_only(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma,
                  const GradientOptions& opts = {});

std::unique_ptr<ParamModel> make_model(std::string_view kind, Index d1, Index d2);

}  // namespace vpgrad
