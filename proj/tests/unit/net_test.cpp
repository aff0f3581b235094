#include <cmath>

#include "axnn/errors.hpp"
#include "axnn/gradcheck.hpp"
#include "axnn/loss.hpp"
#include "axnn/net.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "gradient_oracle.hpp"

using namespace axnn;
using namespace axnn::testing;

namespace {

double weighted_output(const BaseLearner& l, const Matrix& x, std::span<const double> u) {
  const auto f = forward(l, x);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += u[i] * f[i];
  return s;
}

void check_gradients(const LearnerSpec& spec, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  const BaseLearner l = random_learner(rng, spec, p);
  const Matrix x = kink_free_samples(rng, l, 6, 0.05);
  REQUIRE_FALSE(x.empty());
  const auto u = random_vector(rng, 6);
  const auto grads = backward(l, x, u, true);
  const auto numeric = finite_diff_gradient(
      [&](std::span<const double> theta) {
        BaseLearner probe = l;
        probe.params.assign(theta);
        return weighted_output(probe, x, u);
      },
      l.params.flatten(), 1e-3);
  const auto analytic = grads.params.flatten();
  REQUIRE(analytic.size() == numeric.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (std::abs(analytic[i]) <= 1e-8) continue;
    const double rel = std::abs(analytic[i] - numeric[i]) / std::max(std::abs(analytic[i]), std::abs(numeric[i]));
    CHECK_MESSAGE(rel < 1e-5, "coordinate " << i);
  }
  Matrix xs = x;
  const auto numeric_x = finite_diff_gradient([&] { return weighted_output(l, xs, u); }, xs.values(), 1e-3);
  for (std::size_t i = 0; i < numeric_x.size(); ++i) {
    const double a = grads.inputs.values()[i];
    if (std::abs(a) <= 1e-8) continue;
    CHECK(std::abs(a - numeric_x[i]) / std::max(std::abs(a), std::abs(numeric_x[i])) < 1e-5);
  }
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("forward matches the scalar reference implementation") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto kind = trial % 2 == 0 ? LearnerKind::GAMnet : LearnerKind::XNN;
    const std::size_t p = draw_count(rng, 1, 6);
    const auto l = random_learner(rng, random_spec(rng, kind), p);
    const Matrix x = random_matrix(rng, 7, p, -2.0, 2.0);
    const auto f = forward(l, x);
    const Matrix cols = forward_ridges(l, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto ref = reference_forward(l, x.row(i));
      CHECK(f[i] == doctest::Approx(ref.value).epsilon(1e-12));
      double s = 0.0;
      for (std::size_t k = 0; k < cols.cols(); ++k) {
        CHECK(cols(i, k) == doctest::Approx(ref.ridge_terms[k]).epsilon(1e-12));
        s += cols(i, k);
      }
      // Ridge-sum identity is exact: forward sums in the same order.
      CHECK(s + l.params.combination_bias == f[i]);
    }
  }
}

TEST_CASE("zeroed output layers leave only the bias") {
  Rng rng(2);
  auto l = random_learner(rng, {LearnerKind::XNN, 3, {{4, 2}}}, 5);
  for (auto& r : l.params.ridges)
    for (double& w : r.output_weights) w = 0.0;
  const Matrix x = random_matrix(rng, 9, 5);
  const Matrix cols = forward_ridges(l, x);
  for (double v : cols.values()) CHECK(v == 0.0);
  for (double v : forward(l, x)) CHECK(v == l.params.combination_bias);
}

TEST_CASE("backprop matches finite differences on the named shapes") {
  SUBCASE("GAMnet P=3 widths [4]") { check_gradients({LearnerKind::GAMnet, 0, {{4}}}, 3, 21); }
  SUBCASE("xNN K=2 P=4 widths [5,3]") { check_gradients({LearnerKind::XNN, 2, {{5, 3}}}, 4, 22); }
}

TEST_CASE("backprop matches finite differences on random shapes") {
  const auto r = run_gradient_oracle(60, 77);
  CHECK(r.shapes == 60);
  CHECK(r.coordinates > 1000);
  CHECK_MESSAGE(r.worst_relative_error < 1e-5, r.worst_where);
}

TEST_CASE("combination bias gradient is the upstream sum") {
  Rng rng(4);
  const auto l = random_learner(rng, {LearnerKind::XNN, 2, {{3}}}, 3);
  const Matrix x = random_matrix(rng, 10, 3);
  const auto u = random_vector(rng, 10);
  double sum = 0.0;
  for (double v : u) sum += v;
  CHECK(backward(l, x, u).params.combination_bias == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("ReLU derivative at exactly zero is zero") {
  Rng rng(8);
  auto l = new_learner({LearnerKind::GAMnet, 0, {{1}}}, 1, rng);
  l.params.ridges[0].hidden[0].weights(0, 0) = 1.0;
  l.params.ridges[0].hidden[0].bias[0] = 0.0;
  const Matrix x{{0.0}};
  const std::vector<double> u{1.0};
  const auto g = backward(l, x, u, true);
  CHECK(g.params.ridges[0].hidden[0].weights(0, 0) == 0.0);
  CHECK(g.inputs(0, 0) == 0.0);
}

TEST_CASE("parameter layout round trips through flatten and assign") {
  Rng rng(5);
  auto l = random_learner(rng, {LearnerKind::XNN, 3, {{2, 3}}}, 4);
  const auto flat = l.params.flatten();
  CHECK(flat.size() == l.params.size());
  CHECK(flat.size() == parameter_count(l.spec, 4));
  CHECK(flat.front() == l.params.projections(0, 0));
  CHECK(flat.back() == l.params.combination_bias);
  auto shifted = flat;
  for (double& v : shifted) v += 1.0;
  l.params.assign(shifted);
  CHECK(l.params.flatten() == shifted);
  CHECK_THROWS_AS(l.params.assign(std::vector<double>(3, 0.0)), ShapeError);
}

TEST_CASE("parameter counts") {
  // GAMnet P=3 [4]: per ridge 4 + 4 + 4 = 12, x3 = 36, + 3 combination + 1 bias.
  CHECK(parameter_count({LearnerKind::GAMnet, 0, {{4}}}, 3) == 40);
  // xNN K=2 P=4 [5,3]: 8 projections; per ridge 5+5+15+3+3 = 31, x2 = 62; + 2 + 1.
  CHECK(parameter_count({LearnerKind::XNN, 2, {{5, 3}}}, 4) == 73);
}

TEST_CASE("new learners follow the initialisation policy") {
  Rng rng(1);
  const auto l = new_learner({LearnerKind::XNN, 2, {{4}}}, 3, rng);
  CHECK(l.params.projections.rows() == 2);
  CHECK(l.params.projections.cols() == 3);
  for (const auto& r : l.params.ridges)
    for (double b : r.hidden[0].bias) CHECK(b == 0.0);
  for (double c : l.params.combination_weights) CHECK(c == kCombinationInit);
  CHECK(l.params.combination_bias == 0.0);
  CHECK(l.mixture_weight == 0.0);
  const auto g = new_learner({LearnerKind::GAMnet, 0, {{4}}}, 5, rng);
  CHECK(g.num_ridges() == 5);
  CHECK(g.params.projections.empty());
}

TEST_CASE("invalid architectures are rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(new_learner({LearnerKind::XNN, 0, {{4}}}, 3, rng), InvalidArchitectureError);
  CHECK_THROWS_AS(new_learner({LearnerKind::XNN, 2, {{}}}, 3, rng), InvalidArchitectureError);
  CHECK_THROWS_AS(new_learner({LearnerKind::XNN, 2, {{4, 0}}}, 3, rng), InvalidArchitectureError);
  CHECK_THROWS_AS(new_learner({LearnerKind::GAMnet, 2, {{4}}}, 3, rng), InvalidArchitectureError);
  CHECK_THROWS_AS(new_learner({LearnerKind::GAMnet, 0, {{4}}}, 0, rng), InvalidArchitectureError);
  const auto l = new_learner({LearnerKind::XNN, 2, {{4}}}, 3, rng);
  CHECK_THROWS_AS(forward(l, Matrix(2, 4)), ShapeError);
  CHECK_THROWS_AS(backward(l, Matrix(2, 3), std::vector<double>(3, 0.0)), ShapeError);
}

TEST_CASE("loss values and derivatives") {
  CHECK(loss_value(LossKind::Squared, 3.0, 1.0) == 4.0);
  CHECK(loss_derivative(LossKind::Squared, 3.0, 1.0) == 4.0);
  CHECK(loss_value(LossKind::Logistic, 0.0, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(loss_derivative(LossKind::Logistic, 0.0, 1.0) == doctest::Approx(-0.5));
  // Stable far into the tails.
  CHECK(std::isfinite(loss_value(LossKind::Logistic, 800.0, 0.0)));
  CHECK(loss_value(LossKind::Logistic, 800.0, 0.0) == doctest::Approx(800.0));
  CHECK(loss_value(LossKind::Logistic, -800.0, 0.0) < 1e-300);
  for (double f : {-3.0, -0.2, 0.7, 4.0})
    for (double y : {0.0, 1.0}) {
      const double h = 1e-6;
      const double fd = (loss_value(LossKind::Logistic, f + h, y) - loss_value(LossKind::Logistic, f - h, y)) / (2 * h);
      CHECK(loss_derivative(LossKind::Logistic, f, y) == doctest::Approx(fd).epsilon(1e-7));
    }
  CHECK_THROWS_AS(mean_loss(LossKind::Squared, {}, {}), EmptyDataError);
  CHECK_THROWS_AS(loss_kind_from_string("hinge"), InvalidArgumentError);
}

}  // TEST_SUITE
