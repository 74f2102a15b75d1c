#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vpgrad/adjoint.hpp"
#include "vpgrad/matcore.hpp"
#include "vpgrad/problem.hpp"
#include "vpgrad/solve.hpp"
#include "vpgrad/structure.hpp"

namespace py = pybind11;
using namespace vpgrad;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::forcecast>;

DenseMatrix to_matrix(const CArray& x, const char* what) {
  if (x.ndim() == 1) {
    DenseMatrix out(x.shape(0), 1);
    auto v = x.unchecked<1>();
    for (py::ssize_t i = 0; i < x.shape(0); ++i) out(i, 0) = v(i);
    return out;
  }
  if (x.ndim() != 2) throw InputError(std::string(what) + " must be 1-D or 2-D");
  DenseMatrix out(x.shape(0), x.shape(1));
  auto v = x.unchecked<2>();
  for (py::ssize_t j = 0; j < x.shape(1); ++j)
    for (py::ssize_t i = 0; i < x.shape(0); ++i) out(i, j) = v(i, j);
  return out;
}

py::array_t<std::complex<double>> to_array(const DenseMatrix& x) {
  py::array_t<std::complex<double>, py::array::f_style> out({x.rows(), x.cols()});
  std::copy(x.values().begin(), x.values().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::unique_ptr<ParamModel> model_from(const std::string& kind, Index d1, Index d2) { return make_model(kind, d1, d2); }

py::dict report_dict(const SolveReport& rep) {
  py::dict d;
  d["iterations"] = rep.iterations;
  d["termination"] = std::string(to_string(rep.termination));
  d["f_history"] = rep.f_history;
  d["step_lengths"] = rep.step_lengths;
  d["final_sigma"] = to_array(rep.final_sigma);
  d["final_f"] = rep.final_f;
  d["final_grad_norm"] = rep.final_grad_norm;
  d["restarts"] = rep.restarts;
  d["evaluations"] = rep.evaluations;
  if (!rep.error.empty()) d["error"] = rep.error;
  return d;
}

ProblemSpec spec_from(const std::string& model, std::uint64_t seed, Index m, Index n, Index r, Index base_n,
                      Index pairs, Index k_rows, Index l_cols, double noise) {
  ProblemSpec s;
  s.model = parse_model_kind(model);
  s.seed = seed;
  s.m = m;
  s.n = n;
  s.r = r;
  s.base_n = base_n;
  s.pairs = pairs;
  s.k_rows = k_rows;
  s.l_cols = l_cols;
  s.noise = noise;
  return s;
}

}  // namespace

PYBIND11_MODULE(_vpgrad, mod) {
  mod.doc() = "Variable-projection objective, its reverse-mode MGS gradient, and a Broyden solver";

  py::register_exception<RankDeficient>(mod, "RankDeficient", PyExc_ValueError);
  py::register_exception<ObjectiveNearZero>(mod, "ObjectiveNearZero", PyExc_ArithmeticError);
  py::register_exception<InputError>(mod, "InputError", PyExc_ValueError);

  mod.def(
      "mgs", [](const CArray& b) {
        auto res = mgs_orthonormalize(to_matrix(b, "b"));
        return py::make_tuple(to_array(res.q), to_array(res.t_norms));
      },
      py::arg("b"), "Modified Gram-Schmidt: (Q, norms of the deflated columns).");

  mod.def(
      "objective", [](const CArray& a, const CArray& b) { return evaluate_objective(to_matrix(a, "a"), to_matrix(b, "b")); },
      py::arg("a"), py::arg("b"), "sqrt(|A|^2 - |A^H Q(B)|^2)");

  mod.def(
      "recover_c", [](const CArray& a, const CArray& b) { return to_array(recover_c(to_matrix(a, "a"), to_matrix(b, "b"))); },
      py::arg("a"), py::arg("b"));

  mod.def(
      "gradient",
      [](const CArray& a, const CArray& b, const std::string& method, double fd_step) {
        GradientOptions opts;
        opts.fd_step = fd_step;
        auto res = compute_gradient(parse_gradient_method(method), to_matrix(a, "a"), to_matrix(b, "b"), opts);
        py::dict d;
        d["f"] = res.f;
        d["g"] = to_array(res.g);
        d["flops"] = res.flops;
        d["words"] = res.words;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("method") = "amgs", py::arg("fd_step") = 1e-6,
      "Gradient panel G with G_ij = df/dRe(b_ij) + i df/dIm(b_ij).");

  mod.def(
      "account_words",
      [](const std::string& method, std::uint64_t m, std::uint64_t n, std::uint64_t r) {
        return account_words(parse_gradient_method(method), m, n, r);
      },
      py::arg("method"), py::arg("m"), py::arg("n"), py::arg("r"));

  mod.def(
      "build",
      [](const std::string& kind, Index d1, Index d2, const std::vector<double>& sigma) {
        return to_array(model_from(kind, d1, d2)->build(sigma));
      },
      py::arg("model"), py::arg("d1"), py::arg("d2"), py::arg("sigma"),
      "B(sigma) for model 'kronecker' (n, R), 'exponential' (K, L) or 'free' (m, r).");

  mod.def(
      "value_and_gradient",
      [](const std::string& kind, Index d1, Index d2, const CArray& a, const std::vector<double>& sigma,
         const std::string& method) {
        auto model = model_from(kind, d1, d2);
        auto vg = value_and_gradient(*model, to_matrix(a, "a"), sigma, parse_gradient_method(method));
        return py::make_tuple(vg.f, to_array(vg.grad));
      },
      py::arg("model"), py::arg("d1"), py::arg("d2"), py::arg("a"), py::arg("sigma"), py::arg("method") = "amgs");

  mod.def(
      "generate",
      [](const std::string& model, std::uint64_t seed, Index m, Index n, Index r, Index base_n, Index pairs,
         Index k_rows, Index l_cols, double noise) {
        Instance inst = generate_instance(spec_from(model, seed, m, n, r, base_n, pairs, k_rows, l_cols, noise));
        auto s0 = draw_sigma(inst);
        py::dict d;
        d["a"] = to_array(inst.a);
        d["planted_sigma"] = to_array(inst.planted_sigma);
        d["sigma0"] = to_array(s0);
        return d;
      },
      py::arg("model") = "free", py::arg("seed") = 42, py::arg("m") = 20, py::arg("n") = 0, py::arg("r") = 4,
      py::arg("base_n") = 2, py::arg("pairs") = 2, py::arg("k_rows") = 8, py::arg("l_cols") = 2,
      py::arg("noise") = 0.0, "Seeded instance: A, planted sigma (structured models) and the start sigma0.");

  mod.def(
      "solve",
      [](const std::string& kind, Index d1, Index d2, const CArray& a, const std::vector<double>& sigma0,
         const std::string& method, int max_iters, double grad_tol) {
        auto model = model_from(kind, d1, d2);
        SolveOptions opts;
        opts.method = parse_gradient_method(method);
        opts.max_iters = max_iters;
        opts.grad_tol = grad_tol;
        DenseMatrix am = to_matrix(a, "a");
        SolveReport rep;
        {
          py::gil_scoped_release release;
          rep = broyden_minimize(*model, am, sigma0, opts);
        }
        return report_dict(rep);
      },
      py::arg("model"), py::arg("d1"), py::arg("d2"), py::arg("a"), py::arg("sigma0"), py::arg("method") = "amgs",
      py::arg("max_iters") = 5000, py::arg("grad_tol") = 1e-8);
}
