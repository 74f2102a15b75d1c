#include "vpgrad/blocksystem.hpp"

#include <cmath>
#include <functional>

#include "vpgrad/kernels.hpp"

namespace vpgrad {

namespace {

using CVec = std::vector<Complex>;
using LinearMap = std::function<CVec(const CVec&)>;

std::vector<double> realify(const CVec& v) {
  const Index m = v.size();
  std::vector<double> out(2 * m);
  for (Index k = 0; k < m; ++k) {
    out[k] = v[k].real();
    out[m + k] = v[k].imag();
  }
  return out;
}

// Column c of the result is the image of the c-th real basis vector
// (e_c for c < m, i·e_{c-m} otherwise).
std::vector<double> realify(const LinearMap& map, Index m) {
  const Index n2 = 2 * m;
  std::vector<double> out(n2 * n2);
  for (Index c = 0; c < n2; ++c) {
    CVec e(m);
    e[c % m] = c < m ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    const std::vector<double> image = realify(map(e));
    for (Index row = 0; row < n2; ++row) out[row * n2 + c] = image[row];
  }
  return out;
}

Complex cdot(const CVec& x, const CVec& y) {
  return kernels::dot(std::span<const Complex>(x), std::span<const Complex>(y));
}

CVec column(const DenseMatrix& x, Index j) { return CVec(x.col(j).begin(), x.col(j).end()); }

}  // namespace

BlockSystem BlockSystem::assemble(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts) {
  require_same_rows(a, b, "blocksystem");
  require_finite(a, "blocksystem");
  require_finite(b, "blocksystem");
  const Index m = b.rows();
  const Index r = b.cols();
  if (m > kBlockSystemMaxRows || r > kBlockSystemMaxCols) {
    throw SizeCap("blocksystem: m=" + std::to_string(m) + ", r=" + std::to_string(r) +
                  " exceeds the materialization cap (m <= 8, r <= 4)");
  }
  if (r > m) throw InputError("blocksystem: r exceeds m");

  BlockSystem sys;
  sys.m_ = m;
  sys.r_ = r;
  for (Index i = 0; i < r; ++i) {
    sys.nodes_.push_back({BlockNode::Role::Input, i, 0, "b" + std::to_string(i + 1)});
  }

  std::vector<CVec> q(r);
  std::vector<Index> q_node(r);
  for (Index i = 0; i < r; ++i) {
    CVec t = column(b, i);
    Index prev = i;
    double removed_sq = 0.0;
    for (Index j = 0; j < i; ++j) {
      const CVec qj = q[j];
      const CVec tj = t;
      const Complex z = cdot(qj, tj);
      removed_sq += std::norm(z);
      for (Index k = 0; k < m; ++k) t[k] -= z * qj[k];

      const Index node = sys.nodes_.size();
      sys.nodes_.push_back({BlockNode::Role::Deflated, i, j, "u" + std::to_string(j + 1) + std::to_string(i + 1)});
      const LinearMap w = [qj](const CVec& x) {
        const Complex s = cdot(qj, x);
        CVec y(x.size());
        for (Index k = 0; k < x.size(); ++k) y[k] = qj[k] * s - x[k];
        return y;
      };
      const LinearMap v = [qj, tj, z](const CVec& x) {
        const Complex s = std::conj(cdot(tj, x));
        CVec y(x.size());
        for (Index k = 0; k < x.size(); ++k) y[k] = z * x[k] + qj[k] * s;
        return y;
      };
      sys.blocks_.push_back({node, prev, BlockKind::W, realify(w, m)});
      sys.blocks_.push_back({node, q_node[j], BlockKind::V, realify(v, m)});
      prev = node;
    }
    const double nrm = std::sqrt(cdot(t, t).real());
    if (nrm == 0.0 || nrm <= opts.rank_tol * std::sqrt(nrm * nrm + removed_sq)) throw RankDeficient(i);
    CVec qi(m);
    for (Index k = 0; k < m; ++k) qi[k] = t[k] / nrm;
    q[i] = qi;

    const Index node = sys.nodes_.size();
    sys.nodes_.push_back({BlockNode::Role::Orthonormal, i, i, "q" + std::to_string(i + 1)});
    q_node[i] = node;
    const LinearMap s = [qi, nrm](const CVec& x) {
      const double re = cdot(qi, x).real();
      CVec y(x.size());
      for (Index k = 0; k < x.size(); ++k) y[k] = -(x[k] - qi[k] * re) / nrm;
      return y;
    };
    sys.blocks_.push_back({node, prev, BlockKind::S, realify(s, m)});
  }

  // Final row: df = Σ_i Re⟨c_i, dq_i⟩ with c_i = −(1/f)·A·(Aᴴq_i).
  DenseMatrix qm(m, r);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < m; ++k) qm(k, i) = q[i][k];
  sys.f_ = objective_value(a, qm);
  const double threshold = opts.objective_guard * frobenius_norm(a);
  if (sys.f_ <= threshold) throw ObjectiveNearZero(sys.f_, threshold);
  const DenseMatrix aaq = a * (a.adjoint() * qm);
  sys.final_row_.assign(sys.nodes_.size(), {});
  for (Index i = 0; i < r; ++i) {
    CVec c(m);
    for (Index k = 0; k < m; ++k) c[k] = -aaq(k, i) / sys.f_;
    sys.final_row_[q_node[i]] = realify(c);
  }
  return sys;
}

DenseMatrix BlockSystem::solve_gradient() const {
  const Index n2 = 2 * m_;
  std::vector<std::vector<double>> x(nodes_.size(), std::vector<double>(n2, 0.0));
  // Transposed unit lower-triangular solve with right-hand side e_last: the
  // last unknown is 1, so each node starts from ∂f/∂node.
  for (Index node = nodes_.size(); node-- > 0;) {
    auto& xn = x[node];
    if (!final_row_[node].empty()) xn = final_row_[node];
    for (const Block& blk : blocks_) {
      if (blk.col != node) continue;
      const auto& xr = x[blk.row];
      for (Index c = 0; c < n2; ++c) {
        double s = 0.0;
        for (Index row = 0; row < n2; ++row) s += blk.entries[row * n2 + c] * xr[row];
        xn[c] -= s;
      }
    }
  }
  DenseMatrix g(m_, r_);
  for (Index i = 0; i < r_; ++i)
    for (Index k = 0; k < m_; ++k) g(k, i) = Complex(x[i][k], x[i][m_ + k]);
  return g;
}

std::size_t BlockSystem::stored_words() const {
  std::size_t reals = 0;
  for (const Block& blk : blocks_) reals += blk.entries.size();
  for (const auto& row : final_row_) reals += row.size();
  reals += nodes_.size() * 2 * m_;
  return reals / 2;
}

DenseMatrix gradient_blocksystem(const DenseMatrix& a, const DenseMatrix& b, const GradientOptions& opts) {
  return BlockSystem::assemble(a, b, opts).solve_gradient();
}

}  // namespace vpgrad
