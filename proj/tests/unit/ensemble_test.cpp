#include <cmath>
#include <limits>

#include "axnn/errors.hpp"
#include "axnn/generators.hpp"
#include "axnn/hash.hpp"
#include "axnn/metrics.hpp"
#include "axnn/mixture.hpp"
#include "axnn/model_io.hpp"
#include "axnn/scaler.hpp"
#include "axnn/trainer.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "json.hpp"

using namespace axnn;
using namespace axnn::testing;

namespace {

Dataset make_dataset(const Matrix& x, std::vector<double> y) {
  Dataset d;
  d.x = x;
  d.y = std::move(y);
  d.feature_names = default_feature_names(x.cols());
  return d;
}

// Small, quick configuration for end-to-end training tests.
RunConfig quick_config(EnsembleMode mode) {
  RunConfig c = default_config(mode);
  c.j1_max = 3;
  c.j2_max = 3;
  c.epochs_per_iteration = 5;
  c.batch_size = 64;
  c.stage1_seed = {LearnerKind::GAMnet, 0, {{4}}};
  c.stage2_seed = {LearnerKind::XNN, 2, {{4}}};
  c.seed = 17;
  return c;
}

SplitData simple_split(std::size_t n, std::uint64_t seed) {
  return split(gen_simple(n, seed), {{0.5, 0.25, 0.25}, seed});
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("objective of an offset-only ensemble is the mean squared deviation") {
  Ensemble e;
  e.scaler = {{0.0}, {1.0}};
  e.global_offset = 0.5;
  const Matrix x{{1.0}, {2.0}, {3.0}};
  const std::vector<double> y{0.0, 1.0, 2.0};
  CHECK(objective(e, x, y, 0.0, 0.0) == doctest::Approx((0.25 + 0.25 + 2.25) / 3.0));
}

TEST_CASE("objective adds the weight penalty to the empirical risk") {
  Rng rng(4);
  Ensemble e = random_ensemble(rng, 2, 1, 1);
  e.link = LinkKind::Identity;
  const Matrix x = random_matrix(rng, 3, 2);
  const std::vector<double> y{0.1, -0.4, 0.9};
  const auto f = e.predict_link(x);
  double risk = 0.0;
  for (int i = 0; i < 3; ++i) risk += (f[i] - y[i]) * (f[i] - y[i]);
  risk /= 3.0;
  CHECK(objective(e, x, y, 0.0, 0.0) == doctest::Approx(risk).epsilon(1e-14));
  double pen = 0.0;
  for (const auto& l : e.learners) pen += (0.01 * std::sqrt(double(l.parameter_count())) + 0.2) * std::abs(l.mixture_weight);
  CHECK(objective(e, x, y, 0.01, 0.2) == doctest::Approx(risk + pen).epsilon(1e-14));
  CHECK(complexity(e.learners[0]) == doctest::Approx(std::sqrt(double(e.learners[0].parameter_count()))));
}

TEST_CASE("prediction is offset plus weighted learner outputs") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Ensemble e = random_ensemble(rng, 3, 2, 2);
    const Matrix x = random_matrix(rng, 6, 3);
    const Matrix z = apply_scaler(e.scaler, x);
    const auto f = e.predict_link(x);
    std::vector<double> want(6, e.global_offset);
    for (const auto& l : e.learners) {
      const auto h = forward(l, z);
      for (int i = 0; i < 6; ++i) want[i] += l.mixture_weight * h[i];
    }
    for (int i = 0; i < 6; ++i) CHECK(std::abs(f[i] - want[i]) < 1e-10);
    const auto p = e.predict_response(x);
    for (int i = 0; i < 6; ++i) CHECK(p[i] == (e.link == LinkKind::Logit ? sigmoid(f[i]) : f[i]));
  }
}

TEST_CASE("ensemble validation catches stage partition violations") {
  Rng rng(1);
  Ensemble e = random_ensemble(rng, 3, 2, 2);
  CHECK_NOTHROW(e.validate());
  e.stage_boundary = 3;
  CHECK_THROWS_AS(e.validate(), InvariantViolationError);
  e.stage_boundary = 2;
  e.scaler.stds[0] = 0.0;
  CHECK_THROWS_AS(e.validate(), InvariantViolationError);
}

TEST_CASE("mixture weight of a column equal to the residual is one") {
  Rng rng(2);
  const std::size_t n = 50;
  Matrix cols(n, 1);
  std::vector<double> y(n), offset(n);
  for (std::size_t i = 0; i < n; ++i) {
    offset[i] = rng.uniform(-1, 1);
    cols(i, 0) = rng.uniform(-1, 1);
    y[i] = offset[i] + cols(i, 0);
  }
  const std::vector<double> pen{0.0};
  const auto w = optimize_mixture_weights(cols, y, offset, LossKind::Squared, pen);
  CHECK(std::abs(w[0] - 1.0) < 1e-6);
}

TEST_CASE("mixture weights match the normal equations") {
  Rng rng(3);
  const std::size_t n = 40;
  const Matrix c = random_matrix(rng, n, 2);
  const auto y = random_vector(rng, n);
  const std::vector<double> offset(n, 0.0), pen{0.0, 0.0};
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a11 += c(i, 0) * c(i, 0);
    a12 += c(i, 0) * c(i, 1);
    a22 += c(i, 1) * c(i, 1);
    b1 += c(i, 0) * y[i];
    b2 += c(i, 1) * y[i];
  }
  const double det = a11 * a22 - a12 * a12;
  const double w1 = (a22 * b1 - a12 * b2) / det;
  const double w2 = (a11 * b2 - a12 * b1) / det;
  MixtureOptions opts;
  opts.max_iterations = 20000;
  opts.rel_tol = 1e-15;
  const auto w = optimize_mixture_weights(c, y, offset, LossKind::Squared, pen, {}, opts);
  CHECK(std::abs(w[0] - w1) < 1e-6);
  CHECK(std::abs(w[1] - w2) < 1e-6);
}

TEST_CASE("a huge penalty zeroes every mixture weight") {
  Rng rng(4);
  const Matrix c = random_matrix(rng, 30, 3);
  const auto y = random_vector(rng, 30);
  const std::vector<double> offset(30, 0.0), pen(3, 1e6);
  for (double w : optimize_mixture_weights(c, y, offset, LossKind::Squared, pen)) CHECK(w == 0.0);
  std::vector<double> labels(30);
  for (std::size_t i = 0; i < 30; ++i) labels[i] = i % 2;
  for (double w : optimize_mixture_weights(c, labels, offset, LossKind::Logistic, pen)) CHECK(w == 0.0);
}

TEST_CASE("mixture weights reject non-finite columns") {
  Matrix c(3, 1, 1.0);
  c(1, 0) = std::numeric_limits<double>::infinity();
  const std::vector<double> y(3, 0.0), offset(3, 0.0), pen{0.0};
  CHECK_THROWS_AS(optimize_mixture_weights(c, y, offset, LossKind::Squared, pen), DivergenceError);
}

TEST_CASE("candidate generation") {
  const LearnerSpec seed{LearnerKind::GAMnet, 0, {{5}}};
  const auto first = generate_candidates(std::nullopt, seed);
  REQUIRE(first.size() == 1);
  CHECK(first[0] == seed);
  const auto next = generate_candidates(seed, seed);
  REQUIRE(next.size() == 2);
  CHECK(next[0].subnet.hidden_widths == std::vector<std::size_t>{5});
  CHECK(next[1].subnet.hidden_widths == std::vector<std::size_t>{6});
  const LearnerSpec deep{LearnerKind::XNN, 2, {{3, 3}}};
  const auto grown = generate_candidates(deep, seed);
  CHECK(grown[1].subnet.hidden_widths == std::vector<std::size_t>{4, 4});
  CHECK(grown[1].num_ridges == 2);
}

TEST_CASE("stage transition rule") {
  const std::vector<double> falling{1.0, 0.5, 0.25, 0.1};
  CHECK_FALSE(stage_should_advance(falling, 2, 1e-3));
  const std::vector<double> flat{1.0, 1.0, 1.0};
  CHECK(stage_should_advance(flat, 2, 1e-3));
  const std::vector<double> trace{1.0, 0.5, 0.4999, 0.4999};
  CHECK(stage_should_advance(trace, 2, 1e-3));
  const std::vector<double> one_stale{1.0, 0.5, 0.4999};
  CHECK_FALSE(stage_should_advance(one_stale, 2, 1e-3));
  CHECK(stage_should_advance(falling, 2, 1e-3, 4));
  CHECK_THROWS_AS(stage_should_advance({}, 2, 1e-3), InvalidArgumentError);
}

TEST_CASE("fitting a zero residual keeps the learner near zero") {
  Rng rng(5);
  const Matrix x = random_matrix(rng, 500, 2);
  const auto y = random_vector(rng, 500);
  RunConfig c = quick_config(EnsembleMode::Boosting);
  c.epochs_per_iteration = 10;
  const auto l = fit_base_learner(y, {LearnerKind::XNN, 2, {{4}}}, x, y, c, Rng(1));
  const auto h = forward(l, x);
  double m = 0.0;
  for (double v : h) m += v * v;
  m /= 500.0;
  // MSE of the zero function is 0 here.
  CHECK(m <= 1e-3);
}

TEST_CASE("a GAMnet fits a linear target") {
  Rng rng(6);
  const std::size_t n = 10000;
  const Matrix x = random_matrix(rng, n, 2);
  std::vector<double> y(n), offset(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = 2.0 * x(i, 0);
  RunConfig c = default_config(EnsembleMode::Boosting);
  c.epochs_per_iteration = 100;  // 30 leaves it around 5e-3
  const auto l = fit_base_learner(offset, {LearnerKind::GAMnet, 0, {{5}}}, x, y, c, Rng(2));
  CHECK(mse(y, forward(l, x)) < 1e-3);
}

TEST_CASE("stacking stage-1 fits do not depend on earlier learners") {
  Rng rng(7);
  const Matrix x = random_matrix(rng, 300, 2);
  const auto y = random_vector(rng, 300);
  const RunConfig c = quick_config(EnsembleMode::Stacking);
  const std::vector<double> offset(300, 0.3);
  const auto a = fit_base_learner(offset, c.stage1_seed, x, y, c, Rng(9));
  const auto b = fit_base_learner(offset, c.stage1_seed, x, y, c, Rng(9));
  CHECK(a == b);
}

TEST_CASE("training is deterministic and independent of the worker count") {
  const auto data = simple_split(2000, 3);
  const RunConfig c = quick_config(EnsembleMode::Boosting);
  const auto a = train_axnn(c, data.train, data.valid, {1});
  const auto b = train_axnn(c, data.train, data.valid, {1});
  const auto p = train_axnn(c, data.train, data.valid, {3});
  CHECK(a.report == b.report);
  CHECK(a.ensemble == b.ensemble);
  CHECK(model_to_json(a.ensemble) == model_to_json(p.ensemble));
  CHECK(a.report == p.report);
}

TEST_CASE("trained ensembles respect the two-stage structure and selection rule") {
  const auto data = simple_split(2000, 4);
  for (auto mode : {EnsembleMode::Boosting, EnsembleMode::Stacking, EnsembleMode::OneStage}) {
    CAPTURE(to_string(mode));
    const RunConfig c = quick_config(mode);
    const auto r = train_axnn(c, data.train, data.valid);
    CHECK_NOTHROW(r.ensemble.validate());
    if (mode == EnsembleMode::OneStage) CHECK(r.ensemble.stage_boundary == 0);
    else CHECK(r.ensemble.stage_boundary >= 1);
    CHECK(r.ensemble.learners.size() > r.ensemble.stage_boundary);
    CHECK(r.report.iterations.size() == r.ensemble.learners.size());
    for (const auto& it : r.report.iterations) {
      CHECK(it.stage == (it.iteration <= r.ensemble.stage_boundary ? 1 : 2));
      for (const auto& cand : it.candidates)
        if (!cand.failed) CHECK(it.chosen().objective <= cand.objective);
      CHECK(it.weights.size() == it.iteration);
    }
    // Additivity against the training log's own bookkeeping.
    const auto f = r.ensemble.predict_link(data.train.x);
    CHECK(mean_loss(LossKind::Squared, f, data.train.y) ==
          doctest::Approx(r.report.iterations.back().train_loss).epsilon(1e-9));
  }
}

TEST_CASE("stage-1 learners are frozen during stage 2") {
  const auto data = simple_split(2000, 5);
  for (auto mode : {EnsembleMode::Boosting, EnsembleMode::Stacking}) {
    RunConfig c = quick_config(mode);
    const auto full = train_axnn(c, data.train, data.valid);
    // Re-run with stage 2 cut to one iteration: stage 1 is the same run.
    c.j2_max = 1;
    const auto short_run = train_axnn(c, data.train, data.valid);
    CHECK(sha256_hex(stage1_fingerprint_json(full.ensemble)) ==
          sha256_hex(stage1_fingerprint_json(short_run.ensemble)));
    // And the stage-1 weights after stage 1 equal those in the final model.
    const auto& last_stage1 = full.report.iterations[full.ensemble.stage_boundary - 1];
    for (std::size_t j = 0; j < full.ensemble.stage_boundary; ++j)
      CHECK(full.ensemble.learners[j].mixture_weight == last_stage1.weights[j]);
  }
}

TEST_CASE("an additive target is captured by stage 1") {
  Rng rng(12);
  const std::size_t n = 6000;
  Matrix x = random_matrix(rng, n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0) + x(i, 1) * x(i, 1);
  const auto data = split(make_dataset(x, y), {{0.5, 0.25, 0.25}, 1});
  RunConfig c = default_config(EnsembleMode::Boosting);
  c.j2_max = 4;
  const auto r = train_axnn(c, data.train, data.valid);
  Ensemble stage1 = r.ensemble;
  stage1.learners.resize(stage1.stage_boundary);
  CHECK(r2_score(data.valid.y, stage1.predict_link(data.valid.x)) > 0.99);
  // Boosted xNNs fit the residual, so their weights stay near 1; what must be
  // small is what stage 2 adds to the prediction.
  const auto full = r.ensemble.predict_link(data.valid.x);
  const auto part = stage1.predict_link(data.valid.x);
  double ss = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) ss += (full[i] - part[i]) * (full[i] - part[i]);
  CHECK(std::sqrt(ss / static_cast<double>(full.size())) < 0.05);
}

TEST_CASE("the first boosting iteration cuts the loss") {
  const auto data = simple_split(4000, 6);
  RunConfig c = default_config(EnsembleMode::Boosting);
  c.j2_max = 2;
  const auto r = train_axnn(c, data.train, data.valid);
  const double var = sample_variance(data.valid.y);
  CHECK(r.report.iterations.front().valid_loss < 0.75 * var);
}

TEST_CASE("logistic training produces a logit-link model") {
  Rng rng(13);
  const std::size_t n = 3000;
  const Matrix x = random_matrix(rng, n, 3);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform() < sigmoid(3.0 * x(i, 0) - 2.0 * x(i, 1) * x(i, 2)) ? 1.0 : 0.0;
  const auto data = split(make_dataset(x, y), {{0.5, 0.25, 0.25}, 2});
  RunConfig c = quick_config(EnsembleMode::Boosting);
  c.loss = LossKind::Logistic;
  c.epochs_per_iteration = 10;
  const auto r = train_axnn(c, data.train, data.valid);
  CHECK(r.ensemble.link == LinkKind::Logit);
  const auto p = r.ensemble.predict_response(data.test.x);
  for (double v : p) CHECK((v > 0.0 && v < 1.0));
  CHECK(auc(data.test.y, p) > 0.75);
  Dataset bad = data.train;
  bad.y[0] = 0.5;
  CHECK_THROWS_AS(train_axnn(c, bad, data.valid), SchemaError);
}

TEST_CASE("training rejects bad inputs") {
  const auto data = simple_split(200, 7);
  RunConfig c = quick_config(EnsembleMode::Boosting);
  c.j1_max = 0;
  c.rel_tol = -1.0;
  try {
    train_axnn(c, data.train, data.valid);
    FAIL("expected InvalidArgumentError");
  } catch (const InvalidArgumentError& e) {
    const std::string what = e.what();
    CHECK(what.find("j1_max") != std::string::npos);
    CHECK(what.find("rel_tol") != std::string::npos);
  }
  Dataset narrow = data.valid;
  narrow.x = Matrix(narrow.rows(), 3);
  narrow.feature_names.pop_back();
  CHECK_THROWS_AS(train_axnn(quick_config(EnsembleMode::Boosting), data.train, narrow), SchemaError);
}

TEST_CASE("divergent candidates are reported, and all-divergent iterations fail") {
  const auto data = simple_split(400, 8);
  RunConfig c = quick_config(EnsembleMode::Boosting);
  c.optimizer.learning_rate = 1e300;
  CHECK_THROWS_AS(train_axnn(c, data.train, data.valid), DivergenceError);
}

TEST_CASE("run configuration JSON round trip and error enumeration") {
  RunConfig c = default_config(EnsembleMode::Stacking);
  c.seed = 99;
  c.lambda = 0.25;
  c.optimizer.learning_rate = 0.005;
  const auto back = run_config_from_json(run_config_to_json(c), default_config(EnsembleMode::Boosting));
  CHECK(back == c);
  const auto partial = run_config_from_json(R"({"j2_max": 7})", c);
  CHECK(partial.j2_max == 7);
  CHECK(partial.stage2_seed == c.stage2_seed);
  try {
    run_config_from_json(R"({"j1_max": 0, "batch_size": "big", "colour": 3, "mode": "bagging"})", c);
    FAIL("expected InvalidArgumentError");
  } catch (const InvalidArgumentError& e) {
    const std::string what = e.what();
    for (const char* field : {"j1_max", "batch_size", "colour", "mode"})
      CHECK_MESSAGE(what.find(field) != std::string::npos, field);
  }
}

TEST_CASE("model files round trip exactly") {
  Rng rng(14);
  const Ensemble e = random_ensemble(rng, 4, 2, 3);
  const Ensemble back = model_from_json(model_to_json(e));
  CHECK(back == e);
  const Matrix x = random_matrix(rng, 100, 4, -3.0, 3.0);
  CHECK(back.predict_link(x) == e.predict_link(x));
}

TEST_CASE("model loading distinguishes its failure modes") {
  Rng rng(15);
  const Ensemble e = random_ensemble(rng, 3, 3, 1);
  const std::string text = model_to_json(e);
  CHECK_THROWS_AS(model_from_json(text.substr(0, text.size() / 2)), MalformedDocumentError);

  auto doc = nlohmann::json::parse(text);
  doc["format_version"] = 2;
  CHECK_THROWS_AS(model_from_json(doc.dump()), VersionError);

  doc = nlohmann::json::parse(text);
  doc.erase("scaler");
  CHECK_THROWS_AS(model_from_json(doc.dump()), MalformedDocumentError);

  // Learner 2 becomes an xNN while j1 still says 3.
  Ensemble mixed = e;
  Rng r2(1);
  mixed.learners[1] = random_learner(r2, {LearnerKind::XNN, 2, {{3}}}, 3);
  doc = nlohmann::json::parse(model_to_json(mixed));
  doc["j1"] = 3;
  CHECK_THROWS_AS(model_from_json(doc.dump()), InvariantViolationError);

  doc = nlohmann::json::parse(text);
  doc["learners"][3]["projections"][0].push_back(0.5);
  CHECK_THROWS_AS(model_from_json(doc.dump()), ShapeError);

  doc = nlohmann::json::parse(text);
  doc["learners"][0]["combination_weights"].push_back(1.0);
  CHECK_THROWS_AS(model_from_json(doc.dump()), ShapeError);

  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

}  // TEST_SUITE
