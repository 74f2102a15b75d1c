#include "vpgrad/adjoint.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "vpgrad/blocksystem.hpp"
#include "vpgrad/kernels.hpp"

namespace vpgrad {

std::string_view to_string(GradientMethod method) {
  switch (method) {
    case GradientMethod::Fd: return "fd";
    case GradientMethod::Ags: return "ags";
    case GradientMethod::Amgs: return "amgs";
    case GradientMethod::BlockSystem: return "blocksys";
  }
  return "unknown";
}

GradientMethod parse_gradient_method(std::string_view name) {
  if (name == "fd") return GradientMethod::Fd;
  if (name == "ags") return GradientMethod::Ags;
  if (name == "amgs") return GradientMethod::Amgs;
  if (name == "blocksys") return GradientMethod::BlockSystem;
  throw InputError("unknown gradient method '" + std::string(name) + "'");
}

GradientWorkspace::GradientWorkspace(const DenseMatrix& b_in, AllocationTracker* tracker)
    : b(b_in, tracker),
      q(b_in, tracker),
      t(b_in.rows(), b_in.cols(), tracker),
      g(b_in.rows(), b_in.cols(), tracker),
      z(b_in.cols(), Complex{}, TrackingAllocator<Complex>(tracker)) {}

namespace {

void check_inputs(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  require_same_rows(a, b, what);
  require_finite(a, what);
  require_finite(b, what);
  if (b.cols() > b.rows()) throw InputError(std::string(what) + ": r exceeds m");
}

// One pass over the columns of A computes both Σ‖Aᴴq_i‖² and the unscaled
// initializer G = A·(AᴴQ), without any n-length temporary. Returns f.
double objective_and_seed(const DenseMatrix& a, const DenseMatrix& q, DenseMatrix& g, FlopCounter* fc) {
  const double a_sq = kernels::squared_norm(a.values());
  const auto fused = [&]() {
    double captured = 0.0;
    for (Index k = 0; k < a.cols(); ++k) {
      const auto ak = a.col(k);
      for (Index i = 0; i < q.cols(); ++i) {
        const Complex s = kernels::dot(ak, q.col(i), fc);
        captured += std::norm(s);
        kernels::axpy(s, ak, g.col(i), fc);
      }
    }
    if (fc) {
      fc->muls += a.cols() * q.cols();
      fc->adds += a.cols() * q.cols() + 1;
      fc->sqrts += 1;
    }
    return std::sqrt(std::max(0.0, a_sq - captured));
  };
  const double f = fused();
  if (q.cols() == 0 || f > kCancellationRegime * std::sqrt(a_sq)) return f;
  // Near an exact fit: the first r entries of g's first column serve as
  // scratch for the explicit residual, then the seed is rebuilt.
  const double refined = residual_norm(a, q, g.col(0).first(q.cols()), fc);
  for (auto& v : g.values()) v = 0.0;
  fused();
  return refined;
}

void guard_and_scale(double f, const DenseMatrix& a, const GradientOptions& opts, DenseMatrix& g, FlopCounter* fc) {
  const double threshold = opts.objective_guard * frobenius_norm(a);
  if (f <= threshold) throw ObjectiveNearZero(f, threshold);
  fc->divs += 1;
  kernels::scale(-1.0 / f, g.values(), fc);
}

}  // namespace

GradientResult gradient_amgs(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts) {
  check_inputs(a, b, "gradient_amgs");
  AllocationTracker tracker;
  FlopCounter fc;
  GradientResult out;
  {
    GradientWorkspace ws(b, &tracker);
    const Index r = b.cols();

    mgs_in_place(ws.q, opts.rank_tol, &fc);
    out.f = objective_and_seed(a, ws.q, ws.g, &fc);
    guard_and_scale(out.f, a, opts, ws.g, &fc);

    const DenseMatrix& q = ws.q;
    for (Index i = r; i-- > 0;) {
      // Regenerate t_0 = b_i, t_{j+1} = t_j − z_j q_j for j < i.
      kernels::copy(ws.b.col(i), ws.t.col(0));
      for (Index j = 0; j < i; ++j) {
        ws.z[j] = kernels::dot(q.col(j), std::as_const(ws.t).col(j), &fc);
        auto next = ws.t.col(j + 1);
        kernels::copy(std::as_const(ws.t).col(j), next);
        kernels::axpy(-ws.z[j], q.col(j), next, &fc);
      }
      const double t_norm = kernels::norm2(std::as_const(ws.t).col(i), &fc);

      auto gi = ws.g.col(i);
      const Complex beta = kernels::dot(q.col(i), gi, &fc);
      kernels::axpy(-beta, q.col(i), gi, &fc);
      fc.divs += 1;
      kernels::scale(1.0 / t_norm, gi, &fc);

      for (Index j = i; j-- > 0;) {
        auto gj = ws.g.col(j);
        const Complex alpha = kernels::dot(q.col(j), gi, &fc);
        kernels::axpy(-std::conj(ws.z[j]), gi, gj, &fc);
        kernels::axpy(-std::conj(alpha), std::as_const(ws.t).col(j), gj, &fc);
        kernels::axpy(-alpha, q.col(j), gi, &fc);
      }
    }
    out.g = DenseMatrix(ws.g, nullptr);
  }
  out.counts = fc;
  out.flops = fc.total();
  out.words = tracker.peak();
  return out;
}

GradientResult gradient_ags(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts) {
  check_inputs(a, b, "gradient_ags");
  AllocationTracker tracker;
  FlopCounter fc;
  GradientResult out;
  {
    const Index r = b.cols();
    DenseMatrix bw(b, &tracker);
    DenseMatrix q(b, &tracker);
    DenseMatrix g(b.rows(), r, &tracker);
    TrackedVector<Complex> tri(r * (r + 1) / 2, Complex{}, TrackingAllocator<Complex>(&tracker));
    auto at = [&](Index j, Index i) -> Complex& { return tri[i * (i + 1) / 2 + j]; };

    cgs_in_place(q, opts.rank_tol, &fc, tri);
    out.f = objective_and_seed(a, q, g, &fc);
    guard_and_scale(out.f, a, opts, g, &fc);

    for (Index i = r; i-- > 0;) {
      auto gi = g.col(i);
      const Complex beta = kernels::dot(q.col(i), gi, &fc);
      kernels::axpy(-beta, q.col(i), gi, &fc);
      fc.divs += 1;
      kernels::scale(1.0 / at(i, i).real(), gi, &fc);

      // u_i = b_i − Σ_j q_j (q_jᴴ b_i): coefficient slots are reused for
      // α_j = q_jᴴ ḡ once the q_j adjoint has consumed them.
      for (Index j = 0; j < i; ++j) {
        auto gj = g.col(j);
        const Complex alpha = kernels::dot(q.col(j), gi, &fc);
        kernels::axpy(-std::conj(at(j, i)), gi, gj, &fc);
        kernels::axpy(-std::conj(alpha), bw.col(i), gj, &fc);
        at(j, i) = alpha;
      }
      for (Index j = 0; j < i; ++j) kernels::axpy(-at(j, i), q.col(j), gi, &fc);
    }
    out.g = DenseMatrix(g, nullptr);
  }
  out.counts = fc;
  out.flops = fc.total();
  out.words = tracker.peak();
  return out;
}

GradientResult gradient_fd(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts) {
  check_inputs(a, b, "gradient_fd");
  if (!(opts.fd_step > 0.0)) throw InputError("gradient_fd: step must be positive");
  AllocationTracker tracker;
  FlopCounter fc;
  GradientResult out;
  out.g = DenseMatrix(b.rows(), b.cols());
  {
    DenseMatrix work(b.rows(), b.cols(), &tracker);
    TrackedVector<Complex> scratch(b.cols(), Complex{}, TrackingAllocator<Complex>(&tracker));
    const double a_norm = frobenius_norm(a);
    auto eval = [&](Index idx, Complex shifted) {
      kernels::copy(b.values(), work.values());
      work.values()[idx] = shifted;
      mgs_in_place(work, opts.rank_tol, &fc);
      return refine_objective(objective_value(a, work, &fc), a_norm, a, work, scratch, &fc);
    };
    const auto bv = b.values();
    auto gv = out.g.values();
    for (Index idx = 0; idx < bv.size(); ++idx) {
      const Complex x = bv[idx];
      const double h_re = opts.fd_step * (1.0 + std::abs(x.real()));
      const double h_im = opts.fd_step * (1.0 + std::abs(x.imag()));
      const double d_re = (eval(idx, x + Complex(h_re, 0.0)) - eval(idx, x - Complex(h_re, 0.0))) / (2.0 * h_re);
      const double d_im = (eval(idx, x + Complex(0.0, h_im)) - eval(idx, x - Complex(0.0, h_im))) / (2.0 * h_im);
      gv[idx] = Complex(d_re, d_im);
    }
  }
  out.f = evaluate_objective(a, b, opts.rank_tol);
  out.counts = fc;
  out.flops = fc.total();
  out.words = tracker.peak();
  return out;
}

GradientResult compute_gradient(GradientMethod method, const DenseMatrix& a, const DenseMatrix& b,
                                const GradientOptions& opts) {
  switch (method) {
    case GradientMethod::Amgs: return gradient_amgs(a, b, opts);
    case GradientMethod::Ags: return gradient_ags(a, b, opts);
    case GradientMethod::Fd: return gradient_fd(a, b, opts);
    case GradientMethod::BlockSystem: {
      GradientResult out;
      out.g = gradient_blocksystem(a, b, opts);
      out.f = evaluate_objective(a, b, opts.rank_tol);
      out.words = account_words(method, a.rows(), a.cols(), b.cols());
      return out;
    }
  }
  throw std::logic_error("unhandled gradient method");
}

std::uint64_t account_words(GradientMethod method, std::uint64_t m, std::uint64_t /*n*/, std::uint64_t r) {
  switch (method) {
    case GradientMethod::Amgs: return 4 * m * r + r;
    case GradientMethod::Ags: return 3 * m * r + r * (r + 1) / 2;
    case GradientMethod::Fd: return m * r + r;
    case GradientMethod::BlockSystem: return 2 * m * m * r * r + m * r * (r + 5) / 2;
  }
  return 0;
}

}  // namespace vpgrad
