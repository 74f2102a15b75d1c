#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpgrad/flops.hpp"
#include "vpgrad/matrix.hpp"

namespace vpgrad {

inline constexpr double kDefaultRankTol = 1e-12;

/// Column `column` of B became (numerically) dependent on the previous ones
/// during orthonormalization.
class RankDeficient : public std::runtime_error {
 public:
  explicit RankDeficient(Index column)
      : std::runtime_error("rank-deficient factor: column " + std::to_string(column) +
                           " is numerically dependent on earlier columns"),
        column_(column) {}
  Index column() const { return column_; }

 private:
  Index column_;
};

struct OrthoResult {
  DenseMatrix q;                ///< m×r, orthonormal columns
  std::vector<double> t_norms;  ///< ‖u‖₂ of each deflated column before normalization
  DenseMatrix coeffs;           ///< r×r upper triangular R with B = Q·R
};

/// Modified Gram-Schmidt: each column is deflated against q_1..q_{i-1} one at
/// a time, then normalized. Throws RankDeficient when the deflated norm drops
/// to rank_tol·‖b_i‖ or below.
OrthoResult mgs_orthonormalize(const DenseMatrix& b, double rank_tol = kDefaultRankTol);

/// Classical Gram-Schmidt: all projection coefficients of column i are taken
/// against the original b_i. Numerically inferior to MGS; kept for the
/// AGS gradient and the stability comparison.
OrthoResult cgs_orthonormalize(const DenseMatrix& b, double rank_tol = kDefaultRankTol);

/// In-place MGS on the columns of `q` (which hold B on entry). No allocation.
/// `coeffs`, when given, must be r×r and receives R.
void mgs_in_place(DenseMatrix& q, double rank_tol, FlopCounter* fc = nullptr, DenseMatrix* coeffs = nullptr);

/// In-place CGS. `packed_coeffs` holds r(r+1)/2 entries: R's upper triangle
/// packed column by column, (j, i) at i(i+1)/2 + j.
void cgs_in_place(DenseMatrix& q, double rank_tol, FlopCounter* fc, std::span<Complex> packed_coeffs);

/// sqrt(max(0, ‖A‖²_F − Σ‖Aᴴq_i‖²)). ‖A‖²_F is independent of B and is not
/// charged to `fc`.
double objective_value(const DenseMatrix& a, const DenseMatrix& q, FlopCounter* fc = nullptr);

/// Below this multiple of ‖A‖_F the subtraction in objective_value has lost
/// most of its digits: an exact fit evaluates to about 1e-8·‖A‖_F, not 0.
inline constexpr double kCancellationRegime = 1e-6;

/// ‖A − QQᴴA‖_F one column of A at a time; `scratch` (at least r entries)
/// holds Qᴴa_k.
double residual_norm(const DenseMatrix& a, const DenseMatrix& q, std::span<Complex> scratch,
                     FlopCounter* fc = nullptr);

/// `f` from objective_value, replaced by residual_norm when it falls in the
/// cancellation regime relative to `a_norm` = ‖A‖_F.
double refine_objective(double f, double a_norm, const DenseMatrix& a, const DenseMatrix& q, std::span<Complex> scratch,
                        FlopCounter* fc = nullptr);

/// ‖A − Q(QᴴA)‖_F formed explicitly. Reference value for objective_value.
double projection_residual(const DenseMatrix& a, const DenseMatrix& q);

/// argmin_C ‖A − BCᴴ‖_F for fixed full-rank B, through B = QR:
/// Cᴴ = R⁻¹QᴴA by back substitution.
DenseMatrix recover_c(const DenseMatrix& a, const DenseMatrix& b, double rank_tol = kDefaultRankTol);

/// Forward evaluation f(B) = objective_value(A, mgs(B).q), refined near an
/// exact fit, without keeping Q beyond the call.
double evaluate_objective(const DenseMatrix& a, const DenseMatrix& b, double rank_tol = kDefaultRankTol,
                          FlopCounter* fc = nullptr);

}  // namespace vpgrad
