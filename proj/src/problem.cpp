#include "vpgrad/problem.hpp"

namespace vpgrad {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Free: return "free";
    case ModelKind::Kronecker: return "kronecker";
    case ModelKind::Exponential: return "exponential";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "free") return ModelKind::Free;
  if (name == "kronecker") return ModelKind::Kronecker;
  if (name == "exponential") return ModelKind::Exponential;
  throw InputError("unknown model '" + std::string(name) + "'");
}

Index ProblemSpec::rows() const {
  switch (model) {
    case ModelKind::Free: return m;
    case ModelKind::Kronecker: return base_n * base_n;
    case ModelKind::Exponential: return k_rows;
  }
  return 0;
}

Index ProblemSpec::factor_cols() const {
  switch (model) {
    case ModelKind::Free: return r;
    case ModelKind::Kronecker: return pairs;
    case ModelKind::Exponential: return l_cols;
  }
  return 0;
}

Index ProblemSpec::data_cols() const {
  if (n > 0) return n;
  return model == ModelKind::Kronecker ? base_n : factor_cols() + 1;
}

namespace {

std::unique_ptr<ParamModel> model_for(const ProblemSpec& spec) {
  switch (spec.model) {
    case ModelKind::Free: return std::make_unique<FreeModel>(spec.m, spec.r);
    case ModelKind::Kronecker: return std::make_unique<KroneckerModel>(spec.base_n, spec.pairs);
    case ModelKind::Exponential: return std::make_unique<ExponentialModel>(spec.k_rows, spec.l_cols);
  }
  throw InputError("unknown model");
}

}  // namespace

Instance generate_instance(const ProblemSpec& spec) {
  if (!(spec.noise >= 0.0)) throw InputError("noise must be nonnegative");
  Instance inst;
  inst.model = model_for(spec);
  inst.rng = Xorshift64Star(spec.seed);
  const bool real = inst.model->real_valued();
  inst.a_kind = real ? EntryKind::Real : EntryKind::Complex;

  if (spec.a_path) {
    MatrixFile file = read_matrix_file(*spec.a_path);
    if (file.matrix.rows() != inst.model->rows()) {
      throw InputError("A file has " + std::to_string(file.matrix.rows()) + " rows, model needs " +
                       std::to_string(inst.model->rows()));
    }
    inst.a = std::move(file.matrix);
    inst.a_kind = file.kind;
    return inst;
  }

  const Index m = inst.model->rows();
  const Index n = spec.data_cols();
  if (spec.model == ModelKind::Free) {
    inst.a = random_matrix(inst.rng, m, n, true);
    return inst;
  }
  inst.planted_sigma = draw_sigma(inst);
  const DenseMatrix b = inst.model->build(inst.planted_sigma);
  const DenseMatrix c = random_matrix(inst.rng, n, inst.model->cols(), !real);
  const DenseMatrix e = random_matrix(inst.rng, m, n, !real);
  inst.a = b * c.adjoint();
  auto av = inst.a.values();
  auto ev = e.values();
  for (Index k = 0; k < av.size(); ++k) av[k] += spec.noise * ev[k];
  return inst;
}

std::vector<double> draw_sigma(Instance& inst) {
  std::vector<double> sigma(inst.model->num_params());
  for (auto& s : sigma) s = inst.rng.next_symmetric();
  return sigma;
}

}  // namespace vpgrad
