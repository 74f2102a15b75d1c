#include "vpgrad/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "vpgrad/kernels.hpp"

namespace vpgrad {

namespace {

void check_factor(const DenseMatrix& b, const char* what) {
  require_finite(b, what);
  if (b.cols() > b.rows()) throw InputError(std::string(what) + ": more columns than rows");
}

// Normalizes column `i` in place after deflation. `removed_sq` is the squared
// length already projected away, so ‖b_i‖² = ‖u‖² + removed_sq.
double normalize_or_throw(std::span<Complex> u, Index i, double removed_sq, double rank_tol, FlopCounter* fc) {
  const double u_sq = kernels::squared_norm(u, fc);
  const double nrm = std::sqrt(u_sq);
  const double b_nrm = std::sqrt(u_sq + removed_sq);
  if (fc) fc->sqrts += 1;
  if (nrm == 0.0 || nrm <= rank_tol * b_nrm) throw RankDeficient(i);
  const double inv = 1.0 / nrm;
  if (fc) fc->divs += 1;
  kernels::scale(inv, u, fc);
  return nrm;
}

// Packed upper triangle, column-wise: (j, i) with j <= i.
Index packed(Index j, Index i) { return i * (i + 1) / 2 + j; }

}  // namespace

void mgs_in_place(DenseMatrix& q, double rank_tol, FlopCounter* fc, DenseMatrix* coeffs) {
  const Index r = q.cols();
  for (Index i = 0; i < r; ++i) {
    auto u = q.col(i);
    double removed_sq = 0.0;
    for (Index j = 0; j < i; ++j) {
      auto qj = std::as_const(q).col(j);
      const Complex z = kernels::dot(qj, u, fc);
      kernels::axpy(-z, qj, u, fc);
      removed_sq += std::norm(z);
      if (coeffs) (*coeffs)(j, i) = z;
    }
    if (fc) {
      fc->muls += i;
      fc->adds += i;
    }
    const double nrm = normalize_or_throw(u, i, removed_sq, rank_tol, fc);
    if (coeffs) (*coeffs)(i, i) = nrm;
  }
}

void cgs_in_place(DenseMatrix& q, double rank_tol, FlopCounter* fc, std::span<Complex> packed_coeffs) {
  const Index r = q.cols();
  for (Index i = 0; i < r; ++i) {
    auto u = q.col(i);
    double removed_sq = 0.0;
    // All coefficients against the untouched b_i first, then one combined update.
    for (Index j = 0; j < i; ++j) {
      const Complex rji = kernels::dot(std::as_const(q).col(j), u, fc);
      packed_coeffs[packed(j, i)] = rji;
      removed_sq += std::norm(rji);
    }
    for (Index j = 0; j < i; ++j) kernels::axpy(-packed_coeffs[packed(j, i)], std::as_const(q).col(j), u, fc);
    if (fc) {
      fc->muls += i;
      fc->adds += i;
    }
    packed_coeffs[packed(i, i)] = normalize_or_throw(u, i, removed_sq, rank_tol, fc);
  }
}

OrthoResult mgs_orthonormalize(const DenseMatrix& b, double rank_tol) {
  check_factor(b, "mgs_orthonormalize");
  OrthoResult out{b, {}, DenseMatrix(b.cols(), b.cols())};
  mgs_in_place(out.q, rank_tol, nullptr, &out.coeffs);
  out.t_norms.resize(b.cols());
  for (Index i = 0; i < b.cols(); ++i) out.t_norms[i] = out.coeffs(i, i).real();
  return out;
}

OrthoResult cgs_orthonormalize(const DenseMatrix& b, double rank_tol) {
  check_factor(b, "cgs_orthonormalize");
  const Index r = b.cols();
  OrthoResult out{b, {}, DenseMatrix(r, r)};
  std::vector<Complex> tri(r * (r + 1) / 2);
  cgs_in_place(out.q, rank_tol, nullptr, tri);
  out.t_norms.resize(r);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j <= i; ++j) out.coeffs(j, i) = tri[packed(j, i)];
    out.t_norms[i] = tri[packed(i, i)].real();
  }
  return out;
}

double objective_value(const DenseMatrix& a, const DenseMatrix& q, FlopCounter* fc) {
  require_same_rows(a, q, "objective_value");
  const double a_sq = kernels::squared_norm(a.values());
  double captured = 0.0;
  for (Index k = 0; k < a.cols(); ++k) {
    for (Index i = 0; i < q.cols(); ++i) captured += std::norm(kernels::dot(a.col(k), q.col(i), fc));
  }
  if (fc) {
    fc->muls += a.cols() * q.cols();
    fc->adds += a.cols() * q.cols() + 1;
    fc->sqrts += 1;
  }
  return std::sqrt(std::max(0.0, a_sq - captured));
}

double projection_residual(const DenseMatrix& a, const DenseMatrix& q) {
  require_same_rows(a, q, "projection_residual");
  if (q.cols() == 0) return frobenius_norm(a);
  const DenseMatrix coeffs = q.adjoint() * a;
  return frobenius_norm(a - q * coeffs);
}

DenseMatrix recover_c(const DenseMatrix& a, const DenseMatrix& b, double rank_tol) {
  require_same_rows(a, b, "recover_c");
  const OrthoResult qr = mgs_orthonormalize(b, rank_tol);
  const Index r = b.cols();
  // Back substitution R·X = QᴴA, X = Cᴴ.
  DenseMatrix x = qr.q.adjoint() * a;
  for (Index col = 0; col < x.cols(); ++col) {
    for (Index i = r; i-- > 0;) {
      Complex s = x(i, col);
      for (Index j = i + 1; j < r; ++j) s -= qr.coeffs(i, j) * x(j, col);
      x(i, col) = s / qr.coeffs(i, i);
    }
  }
  return x.adjoint();
}

double residual_norm(const DenseMatrix& a, const DenseMatrix& q, std::span<Complex> scratch, FlopCounter* fc) {
  require_same_rows(a, q, "residual_norm");
  const Index m = q.rows(), r = q.cols();
  if (scratch.size() < r) throw InputError("residual_norm: scratch shorter than r");
  double resid = 0.0;
  for (Index k = 0; k < a.cols(); ++k) {
    const auto ak = a.col(k);
    for (Index i = 0; i < r; ++i) scratch[i] = kernels::dot(q.col(i), ak, fc);
    for (Index l = 0; l < m; ++l) {
      Complex v = ak[l];
      for (Index i = 0; i < r; ++i) v -= q(l, i) * scratch[i];
      resid += std::norm(v);
    }
  }
  if (fc) {
    fc->muls += a.cols() * m * (r + 1);
    fc->adds += a.cols() * m * (r + 1);
    fc->sqrts += 1;
  }
  return std::sqrt(resid);
}

double refine_objective(double f, double a_norm, const DenseMatrix& a, const DenseMatrix& q,
                        std::span<Complex> scratch, FlopCounter* fc) {
  if (q.cols() == 0 || f > kCancellationRegime * a_norm) return f;
  return residual_norm(a, q, scratch, fc);
}

double evaluate_objective(const DenseMatrix& a, const DenseMatrix& b, double rank_tol, FlopCounter* fc) {
  require_same_rows(a, b, "evaluate_objective");
  check_factor(b, "evaluate_objective");
  DenseMatrix q(b, nullptr);
  mgs_in_place(q, rank_tol, fc);
  std::vector<Complex> scratch(q.cols());
  return refine_objective(objective_value(a, q, fc), frobenius_norm(a), a, q, scratch, fc);
}

}  // namespace vpgrad
