#include "vpgrad/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace vpgrad {

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  return out;
}

DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.cols() != y.rows()) throw InputError("matrix product: inner dimensions differ");
  DenseMatrix out(x.rows(), y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    auto oc = out.col(j);
    for (Index k = 0; k < x.cols(); ++k) {
      const Complex ykj = y(k, j);
      if (ykj == Complex{}) continue;
      auto xc = x.col(k);
      for (Index i = 0; i < x.rows(); ++i) oc[i] += xc[i] * ykj;
    }
  }
  return out;
}

namespace {

template <typename Op>
DenseMatrix elementwise(const DenseMatrix& x, const DenseMatrix& y, Op op) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InputError("elementwise op: shapes differ");
  DenseMatrix out(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  auto ov = out.values();
  for (Index k = 0; k < ov.size(); ++k) ov[k] = op(xv[k], yv[k]);
  return out;
}

}  // namespace

DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y) {
  return elementwise(x, y, [](Complex a, Complex b) { return a - b; });
}

DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y) {
  return elementwise(x, y, [](Complex a, Complex b) { return a + b; });
}

double frobenius_norm(const DenseMatrix& x) {
  double s = 0.0;
  for (const auto& v : x.values()) s += std::norm(v);
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& x) {
  double m = 0.0;
  for (const auto& v : x.values()) m = std::max(m, std::abs(v));
  return m;
}

double relative_discrepancy(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InputError("discrepancy: shapes differ");
  const double scale = max_abs(y);
  const double diff = max_abs(x - y);
  if (scale == 0.0) return diff;
  return diff / scale;
}

double orthogonality_defect(const DenseMatrix& q) {
  const DenseMatrix gram = q.adjoint() * q;
  return max_abs(gram - DenseMatrix::identity(q.cols()));
}

}  // namespace vpgrad
