#include "doctest.h"

#include "support.hpp"
#include "vpgrad/structure.hpp"

using namespace vpgrad;

namespace {

std::vector<double> random_vector(Xorshift64Star& rng, Index k) {
  std::vector<double> v(k);
  for (double& x : v) x = rng.next_symmetric();
  return v;
}

std::vector<double> fd_sigma(const ParamModel& model, const DenseMatrix& a, std::vector<double> sigma) {
  std::vector<double> out(sigma.size());
  for (std::size_t l = 0; l < sigma.size(); ++l) {
    const double x = sigma[l];
    const double h = 1e-6 * (1.0 + std::abs(x));
    sigma[l] = x + h;
    const double fp = value_only(model, a, sigma);
    sigma[l] = x - h;
    const double fm = value_only(model, a, sigma);
    sigma[l] = x;
    out[l] = (fp - fm) / (2.0 * h);
  }
  return out;
}

double max_rel(const std::vector<double>& x, const std::vector<double>& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num = std::max(num, std::abs(x[i] - y[i]));
    den = std::max(den, std::abs(y[i]));
  }
  return num / den;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

TEST_CASE("kronecker column ordering") {
  KroneckerModel model(2, 1);
  std::vector<double> sigma = {1, 2, 3, 4};
  DenseMatrix b = model.build(sigma);
  CHECK(b.rows() == 4);
  CHECK(b(0, 0) == Complex(3));
  CHECK(b(1, 0) == Complex(4));
  CHECK(b(2, 0) == Complex(6));
  CHECK(b(3, 0) == Complex(8));
}

TEST_CASE("kronecker adjoint by hand") {
  KroneckerModel model(2, 1);
  std::vector<double> sigma = {1, 2, 3, 4};
  DenseMatrix g(4, 1);
  g(0, 0) = 1.0;
  auto d = model.adjoint_sigma(sigma, g);
  CHECK(d == std::vector<double>{3, 0, 1, 0});
}

TEST_CASE("exponential entries") {
  ExponentialModel model(4, 2);
  std::vector<double> zeros(8, 0.0);
  DenseMatrix ones = model.build(zeros);
  for (auto v : ones.values()) CHECK(v == Complex(1.0));

  Xorshift64Star rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> sigma(8);
    for (double& x : sigma) x = 50.0 * rng.next_symmetric();
    DenseMatrix b = model.build(sigma);
    for (auto v : b.values()) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-15);
  }
}

TEST_CASE("free model reshapes") {
  Xorshift64Star rng(9);
  DenseMatrix b = random_matrix(rng, 5, 3);
  FreeModel model(5, 3);
  auto sigma = FreeModel::flatten(b);
  CHECK(max_abs(model.build(sigma) - b) == 0.0);
  CHECK(model.adjoint_sigma(sigma, b) == sigma);
}

TEST_CASE("adjoint pairs with the tangent map") {
  std::vector<std::unique_ptr<ParamModel>> models;
  models.push_back(std::make_unique<KroneckerModel>(3, 2));
  models.push_back(std::make_unique<ExponentialModel>(6, 3));
  models.push_back(std::make_unique<FreeModel>(7, 2));
  for (const auto& model : models) {
    CAPTURE(model->kind());
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Xorshift64Star rng(seed);
      auto sigma = random_vector(rng, model->num_params());
      auto v = random_vector(rng, model->num_params());
      DenseMatrix g = random_matrix(rng, model->rows(), model->cols());
      const double lhs = real_pairing(model->tangent(sigma, v), g);
      const double rhs = dot(v, model->adjoint_sigma(sigma, g));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), 1.0));
    }
  }
}

TEST_CASE("sigma gradient matches finite differences") {
  struct Case {
    std::unique_ptr<ParamModel> model;
    Index n;
  };
  std::vector<Case> cases;
  cases.push_back({std::make_unique<KroneckerModel>(2, 2), 3});
  cases.push_back({std::make_unique<ExponentialModel>(4, 2), 3});
  cases.push_back({std::make_unique<FreeModel>(6, 2), 4});
  for (const auto& c : cases) {
    CAPTURE(c.model->kind());
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Xorshift64Star rng(seed);
      DenseMatrix a = random_matrix(rng, c.model->rows(), c.n);
      auto sigma = random_vector(rng, c.model->num_params());
      auto vg = value_and_gradient(*c.model, a, sigma);
      CHECK(max_rel(vg.grad, fd_sigma(*c.model, a, sigma)) <= 1e-6);
    }
  }
}

TEST_CASE("free model gradient is the flattened panel") {
  Xorshift64Star rng(4);
  DenseMatrix a = random_matrix(rng, 6, 3);
  DenseMatrix b = random_matrix(rng, 6, 2);
  FreeModel model(6, 2);
  auto vg = value_and_gradient(model, a, FreeModel::flatten(b));
  CHECK(vg.grad == FreeModel::flatten(gradient_amgs(a, b).g));
}

TEST_CASE("kronecker scale directions carry no gradient") {
  KroneckerModel model(3, 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Xorshift64Star rng(seed);
    DenseMatrix a = random_matrix(rng, 9, 4, false);
    auto sigma = random_vector(rng, model.num_params());
    auto vg = value_and_gradient(model, a, sigma);
    for (Index i = 0; i < 2; ++i) {
      double pd = 0.0, qd = 0.0, gn = 0.0, sn = 0.0;
      for (Index a_ = 0; a_ < 3; ++a_) {
        const Index p = 6 * i + a_, q = 6 * i + 3 + a_;
        pd += sigma[p] * vg.grad[p];
        qd += sigma[q] * vg.grad[q];
        gn += vg.grad[p] * vg.grad[p] + vg.grad[q] * vg.grad[q];
        sn += sigma[p] * sigma[p] + sigma[q] * sigma[q];
      }
      const double scale = std::sqrt(gn * sn);
      CHECK(std::abs(pd - qd) <= 1e-10 * scale);
      CHECK(std::abs(pd) <= 1e-10 * scale);
    }
    // and the objective itself does not move
    auto scaled = sigma;
    for (Index a_ = 0; a_ < 3; ++a_) {
      scaled[a_] *= 2.5;
      scaled[3 + a_] /= 2.5;
    }
    CHECK(vpgrad::testing::rel(value_only(model, a, scaled), vg.f) <= 1e-12);
  }
}

TEST_CASE("shape errors") {
  KroneckerModel model(2, 2);
  CHECK_THROWS_AS(model.build(std::vector<double>(7)), InputError);
  CHECK_THROWS_AS(model.adjoint_sigma(std::vector<double>(8), DenseMatrix(4, 3)), InputError);
  CHECK_THROWS_AS(ExponentialModel(2, 3), InputError);
  CHECK_THROWS(make_model("tensor", 2, 2));
}
