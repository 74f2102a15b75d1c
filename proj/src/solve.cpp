#include "vpgrad/solve.hpp"
#include "vpgrad/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace vpgrad {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "GradTol";
    case Termination::StepTol: return "StepTol";
    case Termination::IterCap: return "IterCap";
    case Termination::ObjectiveNearZero: return "ObjectiveNearZero";
    case Termination::RankDeficient: return "RankDeficient";
  }
  return "unknown";
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

}  // namespace

void BroydenState::reset(std::span<const double> grad) {
  const double scale = two_norm(grad);
  std::fill(h_.begin(), h_.end(), 0.0);
  const double diag = scale > 0.0 ? 1.0 / scale : 1.0;
  for (std::size_t k = 0; k < dim_; ++k) h_[k * dim_ + k] = diag;
  ++restarts_;
}

std::vector<double> BroydenState::direction(std::span<const double> grad) const {
  std::vector<double> d(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += h_[i * dim_ + j] * grad[j];
    d[i] = -s;
  }
  return d;
}

bool BroydenState::update(std::span<const double> s, std::span<const double> y, std::span<const double> grad,
                          double guard) {
  std::vector<double> w(s.begin(), s.end());
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) w[i] -= h_[i * dim_ + j] * y[j];
  }
  const double s_sq = dot(s, s);
  if (s_sq == 0.0) {
    reset(grad);
    return false;
  }
  const double denom = dot(w, y);
  // secant equation already (nearly) holds along this step
  if (std::abs(denom) <= 1e-8 * two_norm(w) * two_norm(y)) return true;
  if (!(std::abs(denom) > guard * s_sq)) {
    reset(grad);
    return false;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double u = w[i] / denom;
    for (std::size_t j = 0; j < dim_; ++j) h_[i * dim_ + j] += u * w[j];
  }
  return true;
}

bool restart_policy(BroydenState& state, std::span<const double> grad, std::span<const double> direction) {
  const double scale = two_norm(grad) * two_norm(direction);
  if (scale > 0.0 && dot(grad, direction) < -1e-12 * scale) return false;
  state.reset(grad);
  return true;
}

namespace {

struct Evaluation {
  double f = 0.0;
  std::vector<double> grad;  ///< ∂f/∂σ
  double merit = 0.0;
  std::vector<double> merit_grad;
};

// Outcome of one evaluation attempt at σ.
struct Probe {
  std::optional<Evaluation> eval;
  std::optional<double> near_zero_f;
  std::optional<std::string> rank_error;
};

Probe probe(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma, const SolveOptions& opts) {
  Probe p;
  try {
    auto vg = value_and_gradient(model, a, sigma, opts.method, opts.gradient);
    Evaluation ev{vg.f, std::move(vg.grad), vg.f, {}};
    if (opts.squared_merit) {
      ev.f = projection_residual(a, mgs_orthonormalize(model.build(sigma), opts.gradient.rank_tol).q);
    }
    // The FD route never refuses; apply the same guard to every method.
    if (ev.f <= opts.gradient.objective_guard * frobenius_norm(a)) {
      p.near_zero_f = ev.f;
      return p;
    }
    ev.merit_grad = ev.grad;
    if (opts.squared_merit) {
      ev.merit = 0.5 * ev.f * ev.f;
      for (double& g : ev.merit_grad) g *= vg.f;
    }
    p.eval = std::move(ev);
  } catch (const ObjectiveNearZero& e) {
    p.near_zero_f = e.f();
  } catch (const RankDeficient& e) {
    p.rank_error = e.what();
  }
  return p;
}

}  // namespace

SolveReport broyden_minimize(const ParamModel& model, const DenseMatrix& a, std::span<const double> sigma0,
                             const SolveOptions& opts) {
  if (sigma0.size() != model.num_params()) throw InputError("broyden_minimize: sigma0 has the wrong length");
  if (opts.max_iters <= 0 || !(opts.grad_tol > 0) || !(opts.step_tol > 0) || !(opts.backtrack > 0) ||
      !(opts.backtrack < 1) || !(opts.armijo > 0) || opts.max_backtracks <= 0) {
    throw InputError("broyden_minimize: options must be positive");
  }
  SolveReport rep;
  rep.options = opts;
  std::vector<double> sigma(sigma0.begin(), sigma0.end());
  rep.final_sigma = sigma;

  Probe start = probe(model, a, sigma, opts);
  ++rep.evaluations;
  if (start.rank_error) {
    rep.termination = Termination::RankDeficient;
    rep.error = *start.rank_error;
    return rep;
  }
  if (start.near_zero_f) {
    rep.termination = Termination::ObjectiveNearZero;
    rep.final_f = *start.near_zero_f;
    rep.f_history.push_back(rep.final_f);
    return rep;
  }
  Evaluation cur = std::move(*start.eval);
  rep.f_history.push_back(cur.f);
  rep.final_f = cur.f;
  rep.final_grad_norm = inf_norm(cur.grad);
  if (rep.final_grad_norm <= opts.grad_tol) {
    rep.termination = Termination::GradTol;
    return rep;
  }

  const std::size_t k = sigma.size();
  BroydenState state(k);
  state.reset(cur.merit_grad);
  int initial_resets = state.restarts();

  std::vector<double> trial(k);
  while (rep.iterations < opts.max_iters) {
    std::vector<double> d = state.direction(cur.merit_grad);
    bool steepest = restart_policy(state, cur.merit_grad, d);
    if (steepest) d = state.direction(cur.merit_grad);

    std::optional<Evaluation> accepted;
    double alpha = 1.0;
    double slope = 0.0;
    for (;;) {
      slope = dot(cur.merit_grad, d);
      alpha = 1.0;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt, alpha *= opts.backtrack) {
        for (std::size_t i = 0; i < k; ++i) trial[i] = sigma[i] + alpha * d[i];
        Probe p = probe(model, a, trial, opts);
        ++rep.evaluations;
        if (p.near_zero_f) {
          ++rep.iterations;
          rep.step_lengths.push_back(alpha);
          rep.slopes.push_back(slope);
          rep.f_history.push_back(*p.near_zero_f);
          rep.final_sigma = trial;
          rep.final_f = *p.near_zero_f;
          rep.final_grad_norm = 0.0;
          rep.termination = Termination::ObjectiveNearZero;
          rep.restarts = state.restarts() - initial_resets;
          return rep;
        }
        if (!p.eval) continue;  // rank-deficient trial point: shorten the step
        if (p.eval->merit <= cur.merit + opts.armijo * alpha * slope) {
          accepted = std::move(p.eval);
          break;
        }
      }
      if (accepted || steepest) break;
      // Quasi-Newton direction failed the line search: fall back once to
      // steepest descent.
      state.reset(cur.merit_grad);
      steepest = true;
      d = state.direction(cur.merit_grad);
    }
    if (!accepted) {
      rep.termination = Termination::StepTol;
      break;
    }

    std::vector<double> s(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
      s[i] = alpha * d[i];
      y[i] = accepted->merit_grad[i] - cur.merit_grad[i];
    }
    const double sigma_scale = 1.0 + inf_norm(sigma);
    for (std::size_t i = 0; i < k; ++i) sigma[i] += s[i];
    cur = std::move(*accepted);
    ++rep.iterations;
    rep.step_lengths.push_back(alpha);
    rep.slopes.push_back(slope);
    rep.f_history.push_back(cur.f);
    rep.final_sigma = sigma;
    rep.final_f = cur.f;
    rep.final_grad_norm = inf_norm(cur.grad);

    if (rep.final_grad_norm <= opts.grad_tol) {
      rep.termination = Termination::GradTol;
      break;
    }
    if (inf_norm(s) <= opts.step_tol * sigma_scale) {
      rep.termination = Termination::StepTol;
      break;
    }
    state.update(s, y, cur.merit_grad, opts.update_guard);
  }
  rep.restarts = state.restarts() - initial_resets;
  return rep;
}

}  // namespace vpgrad
