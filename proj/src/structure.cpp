#include "vpgrad/structure.hpp"

#include <cmath>
#include <string>

namespace vpgrad {

void ParamModel::check_sigma(std::span<const double> sigma, const char* what) const {
  if (sigma.size() != num_params()) {
    throw InputError(std::string(what) + ": expected " + std::to_string(num_params()) + " parameters, got " +
                     std::to_string(sigma.size()));
  }
  for (double s : sigma)
    if (!std::isfinite(s)) throw InputError(std::string(what) + ": non-finite parameter");
}

void ParamModel::check_panel(const DenseMatrix& g, const char* what) const {
  if (g.rows() != rows() || g.cols() != cols()) {
    throw InputError(std::string(what) + ": gradient panel must be " + std::to_string(rows()) + "x" +
                     std::to_string(cols()));
  }
}

// ---- Kronecker ----

KroneckerModel::KroneckerModel(Index base_n, Index pairs) : n_(base_n), pairs_(pairs) {
  if (base_n == 0 || pairs == 0) throw InputError("kronecker model: dimensions must be positive");
  if (pairs > base_n * base_n) throw InputError("kronecker model: R exceeds n^2");
}

DenseMatrix KroneckerModel::build(std::span<const double> sigma) const {
  check_sigma(sigma, "kronecker build");
  DenseMatrix b(rows(), cols());
  for (Index i = 0; i < pairs_; ++i) {
    const double* p = sigma.data() + 2 * n_ * i;
    const double* q = p + n_;
    auto col = b.col(i);
    for (Index a = 0; a < n_; ++a)
      for (Index beta = 0; beta < n_; ++beta) col[a * n_ + beta] = p[a] * q[beta];
  }
  return b;
}

DenseMatrix KroneckerModel::tangent(std::span<const double> sigma, std::span<const double> v) const {
  check_sigma(sigma, "kronecker tangent");
  check_sigma(v, "kronecker tangent");
  DenseMatrix db(rows(), cols());
  for (Index i = 0; i < pairs_; ++i) {
    const double* p = sigma.data() + 2 * n_ * i;
    const double* q = p + n_;
    const double* dp = v.data() + 2 * n_ * i;
    const double* dq = dp + n_;
    auto col = db.col(i);
    for (Index a = 0; a < n_; ++a)
      for (Index beta = 0; beta < n_; ++beta) col[a * n_ + beta] = dp[a] * q[beta] + p[a] * dq[beta];
  }
  return db;
}

std::vector<double> KroneckerModel::adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const {
  check_sigma(sigma, "kronecker adjoint");
  check_panel(g, "kronecker adjoint");
  std::vector<double> out(num_params(), 0.0);
  for (Index i = 0; i < pairs_; ++i) {
    const double* p = sigma.data() + 2 * n_ * i;
    const double* q = p + n_;
    double* dp = out.data() + 2 * n_ * i;
    double* dq = dp + n_;
    auto col = g.col(i);
    // M(a, β) = Re g_i[a·n + β]; dp = M q, dq = Mᵀ p.
    for (Index a = 0; a < n_; ++a) {
      for (Index beta = 0; beta < n_; ++beta) {
        const double mab = col[a * n_ + beta].real();
        dp[a] += mab * q[beta];
        dq[beta] += mab * p[a];
      }
    }
  }
  return out;
}

// ---- Exponential ----

ExponentialModel::ExponentialModel(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw InputError("exponential model: dimensions must be positive");
  if (cols > rows) throw InputError("exponential model: L exceeds K");
}

DenseMatrix ExponentialModel::build(std::span<const double> sigma) const {
  check_sigma(sigma, "exponential build");
  DenseMatrix b(rows_, cols_);
  auto bv = b.values();
  for (Index k = 0; k < bv.size(); ++k) bv[k] = std::polar(1.0, sigma[k]);
  return b;
}

DenseMatrix ExponentialModel::tangent(std::span<const double> sigma, std::span<const double> v) const {
  check_sigma(sigma, "exponential tangent");
  check_sigma(v, "exponential tangent");
  DenseMatrix db(rows_, cols_);
  auto dv = db.values();
  for (Index k = 0; k < dv.size(); ++k) dv[k] = Complex(0.0, v[k]) * std::polar(1.0, sigma[k]);
  return db;
}

std::vector<double> ExponentialModel::adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const {
  check_sigma(sigma, "exponential adjoint");
  check_panel(g, "exponential adjoint");
  std::vector<double> out(num_params());
  auto gv = g.values();
  for (Index k = 0; k < out.size(); ++k) {
    const Complex db = Complex(0.0, 1.0) * std::polar(1.0, sigma[k]);
    out[k] = (std::conj(gv[k]) * db).real();
  }
  return out;
}

// ---- Free ----

FreeModel::FreeModel(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw InputError("free model: dimensions must be positive");
  if (cols > rows) throw InputError("free model: r exceeds m");
}

std::vector<double> FreeModel::flatten(const DenseMatrix& b) {
  std::vector<double> out;
  out.reserve(2 * b.size());
  for (const auto& v : b.values()) {
    out.push_back(v.real());
    out.push_back(v.imag());
  }
  return out;
}

DenseMatrix FreeModel::build(std::span<const double> sigma) const {
  check_sigma(sigma, "free build");
  DenseMatrix b(rows_, cols_);
  auto bv = b.values();
  for (Index k = 0; k < bv.size(); ++k) bv[k] = Complex(sigma[2 * k], sigma[2 * k + 1]);
  return b;
}

DenseMatrix FreeModel::tangent(std::span<const double> sigma, std::span<const double> v) const {
  check_sigma(sigma, "free tangent");
  return build(v);
}

std::vector<double> FreeModel::adjoint_sigma(std::span<const double> sigma, const DenseMatrix& g) const {
  check_sigma(sigma, "free adjoint");
  check_panel(g, "free adjoint");
  return flatten(g);
}

// ---- composition ----

double real_pairing(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InputError("real_pairing: shapes differ");
  double s = 0.0;
  auto xv = x.values();
  auto yv = y.values();
  for (Index k = 0; k < xv.size(); ++k) s += (std::conj(yv[k]) * xv[k]).real();
  return s;
}

ValueAndGradient value_and_gradient(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma,
                                    GradientMethod method, const GradientOptions& opts) {
  if (a.rows() != model.rows()) throw InputError("value_and_gradient: model rows do not match A");
  const DenseMatrix b = model.build(sigma);
  const GradientResult gr = compute_gradient(method, a, b, opts);
  return {gr.f, model.adjoint_sigma(sigma, gr.g), gr.flops};
}

double value_only(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma,
                  const GradientOptions& opts) {
  if (a.rows() != model.rows()) throw InputError("value_only: model rows do not match A");
  return evaluate_objective(a, model.build(sigma), opts.rank_tol);
}

std::unique_ptr<ParamModel> make_model(std::string_view kind, Index d1, Index d2) {
  if (kind == "free") return std::make_unique<FreeModel>(d1, d2);
  if (kind == "kronecker") return std::make_unique<KroneckerModel>(d1, d2);
  if (kind == "exponential") return std::make_unique<ExponentialModel>(d1, d2);
  throw InputError("unknown model kind '" + std::string(kind) + "'");
}

}  // namespace vpgrad
