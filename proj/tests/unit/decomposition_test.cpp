#include <cmath>

#include "axnn/decomposition.hpp"
#include "axnn/errors.hpp"
#include "axnn/metrics.hpp"
#include "axnn/trainer.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace axnn;
using namespace axnn::testing;

TEST_SUITE("decomposition") {

TEST_CASE("active sets") {
  const std::vector<double> a{0.9, 0.9, 0.01}, b{0.08, 0.8, 0.8}, zero{0.0, 0.0, 0.0};
  CHECK(active_set(a, 0.15, false) == ActiveSet{0, 1});
  CHECK(active_set(b, 0.15, false) == ActiveSet{1, 2});
  CHECK(active_set(zero, 0.3, false).empty());
  CHECK(active_set(zero, 0.3, true).empty());
  // Normalisation makes the set scale-free.
  const std::vector<double> big{9.0, 9.0, 0.1}, tiny{0.009, 0.009, 0.0001};
  CHECK(active_set(big, 0.15) == active_set(tiny, 0.15));
  CHECK(active_set(tiny, 0.15, false).empty());
  CHECK_THROWS_AS(active_set(a, 0.0), InvalidArgumentError);
}

TEST_CASE("the illustrated four-learner ensemble decomposes into five groups") {
  const Ensemble e = illustrated_ensemble();
  Rng rng(1);
  const Matrix x = random_matrix(rng, 200, 3);
  const EffectTable t = decompose(e, x, {0.15, false});
  REQUIRE(t.groups.size() == 5);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto g = t.find(GroupKind::Main, {p});
    REQUIRE(g);
    const std::vector<RidgeRef> want{{0, p}, {1, p}};
    CHECK(t.groups[*g].ridges == want);
  }
  const auto i12 = t.find(GroupKind::Interaction, {0, 1});
  const auto i23 = t.find(GroupKind::Interaction, {1, 2});
  REQUIRE(i12);
  REQUIRE(i23);
  CHECK(t.groups[*i12].ridges == std::vector<RidgeRef>{{2, 0}, {2, 1}});
  CHECK(t.groups[*i23].ridges == std::vector<RidgeRef>{{3, 0}, {3, 1}});
  CHECK_FALSE(t.find(GroupKind::Null, {}));

  // I_{x1,x2} = w3 g31 + w3 g32, centred.
  const Matrix cols = forward_ridges(e.learners[2], x);
  std::vector<double> raw(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) raw[i] = 0.9 * cols(i, 0) + 0.9 * cols(i, 1);
  const double c = mean(raw);
  for (std::size_t i = 0; i < x.rows(); ++i) CHECK(t.groups[*i12].values[i] == doctest::Approx(raw[i] - c).epsilon(1e-12));

  const auto f = e.predict_link(x);
  const auto total = t.total();
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(total[i] - f[i]) < 1e-10);
}

TEST_CASE("a stage-1-only ensemble has only main effects") {
  Rng rng(3);
  const Ensemble e = random_ensemble(rng, 4, 3, 0);
  const Matrix x = random_matrix(rng, 50, 4);
  const auto t = decompose(e, x);
  CHECK(t.groups.size() == 4);
  for (const auto& g : t.groups) CHECK(g.kind == GroupKind::Main);
  const auto f = e.predict_link(x);
  const auto total = t.total();
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(total[i] - f[i]) < 1e-10);
}

TEST_CASE("large thresholds send every stage-2 ridge to the null group") {
  Rng rng(4);
  const Ensemble e = random_ensemble(rng, 4, 1, 3);
  const Matrix x = random_matrix(rng, 40, 4);
  const auto t = decompose(e, x, {1.0, true});
  const auto null = t.find(GroupKind::Null, {});
  REQUIRE(null);
  std::size_t stage2 = 0;
  for (std::size_t j = 1; j < e.learners.size(); ++j) stage2 += e.learners[j].num_ridges();
  CHECK(t.groups[*null].ridges.size() == stage2);
  for (const auto& g : t.groups) CHECK(g.kind != GroupKind::Interaction);
}

TEST_CASE("stage-2 singletons merge into main effects") {
  Ensemble e = illustrated_ensemble();
  e.learners[3].params.projections = Matrix{{0.0, 1.0, 0.0}, {0.05, 0.02, 0.9}};
  Rng rng(5);
  const auto t = decompose(e, random_matrix(rng, 30, 3), {0.15, true});
  const auto m2 = t.find(GroupKind::Main, {1});
  const auto m3 = t.find(GroupKind::Main, {2});
  REQUIRE(m2);
  REQUIRE(m3);
  CHECK(t.groups[*m2].ridges == std::vector<RidgeRef>{{0, 1}, {1, 1}, {3, 0}});
  CHECK(t.groups[*m3].ridges == std::vector<RidgeRef>{{0, 2}, {1, 2}, {3, 1}});
}

TEST_CASE("decompose rejects mismatched data") {
  Rng rng(6);
  const Ensemble e = random_ensemble(rng, 3, 1, 1);
  CHECK_THROWS_AS(decompose(e, Matrix(4, 2)), SchemaError);
  CHECK_THROWS_AS(decompose(e, Matrix(4, 3), {-0.1, true}), InvalidArgumentError);
}

TEST_CASE("importance ratios") {
  EffectTable t;
  t.x = Matrix(4, 1);
  // Orthogonal groups with sample variances 3 and 1 (scaled by 4/3).
  EffectGroup a, b, flat;
  a.values = {1.5, -1.5, 1.5, -1.5};
  b.values = {-0.866025403784438597, -0.866025403784438597, 0.866025403784438597, 0.866025403784438597};
  flat.values = {0.0, 0.0, 0.0, 0.0};
  a.kind = b.kind = flat.kind = GroupKind::Main;
  a.members = {0};
  b.members = {1};
  flat.members = {2};
  t.groups = {flat, a, b};
  std::vector<double> f(4);
  for (int i = 0; i < 4; ++i) f[i] = a.values[i] + b.values[i];
  const auto r = importance(t, f);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].group == 1);
  CHECK(r.entries[0].importance == doctest::Approx(0.75));
  CHECK(r.entries[1].importance == doctest::Approx(0.25));
  CHECK(r.entries[2].importance == 0.0);
  CHECK_FALSE(r.entries[2].significant);
  CHECK(r.entries[0].rank == 1);
  CHECK(r.entries[2].rank == 3);

  EffectTable single;
  single.x = Matrix(3, 1);
  EffectGroup g;
  g.values = {1.0, 2.0, 6.0};
  single.groups = {g};
  const std::vector<double> fs{11.0, 12.0, 16.0};
  CHECK(importance(single, fs).entries[0].importance == doctest::Approx(1.0));
  const std::vector<double> constant{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(importance(single, constant), DegenerateModelError);
}

TEST_CASE("threshold sweep") {
  Rng rng(7);
  const Ensemble e = random_ensemble(rng, 4, 1, 3);
  const Matrix x = random_matrix(rng, 60, 4);
  const std::vector<double> thetas{0.1, 0.2, 0.3};
  const auto s = threshold_sweep(e, x, thetas);
  REQUIRE(s.entries.size() == 3);
  std::size_t coefficients = 0;
  for (std::size_t j = 1; j < e.learners.size(); ++j) coefficients += e.learners[j].params.projections.size();
  CHECK(s.abs_coefficients.size() == coefficients);
  for (double v : s.abs_coefficients) CHECK((v >= 0.0 && v <= 1.0 + 1e-12));
  for (const auto& entry : s.entries) {
    const auto f = e.predict_link(x);
    const auto total = entry.table.total();
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(total[i] - f[i]) < 1e-10);
  }
  const std::vector<double> unsorted{0.3, 0.2};
  CHECK_THROWS_AS(threshold_sweep(e, x, unsorted), InvalidArgumentError);
}

TEST_CASE("effect curves") {
  const Ensemble e = illustrated_ensemble();
  Rng rng(8);
  const Matrix x = random_matrix(rng, 100, 3);
  const auto t = decompose(e, x, {0.15, false});
  const auto m1 = *t.find(GroupKind::Main, {0});
  const auto line = effect_curve(e, t, m1, 25);
  CHECK(line.kind == CurveKind::Line);
  CHECK(line.grid_x.size() == 25);
  CHECK(line.values.size() == 25);
  const auto one = effect_curve(e, t, m1, 1);
  CHECK(one.values.size() == 1);

  const auto i12 = *t.find(GroupKind::Interaction, {0, 1});
  const auto surface = effect_curve(e, t, i12);
  CHECK(surface.kind == CurveKind::Surface);
  CHECK(surface.surface.rows() == 50);
  CHECK(surface.surface.cols() == 50);

  // A zeroed ridge gives a flat curve.
  Ensemble flat = e;
  for (std::size_t j = 0; j < 2; ++j)
    for (double& w : flat.learners[j].params.ridges[0].output_weights) w = 0.0;
  const auto tf = decompose(flat, x, {0.15, false});
  const auto curve = effect_curve(flat, tf, *tf.find(GroupKind::Main, {0}), 10);
  for (double v : curve.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(effect_curve(e, t, 99), InvalidArgumentError);
}

TEST_CASE("main effect curve of a model trained on x1 squared") {
  Rng rng(9);
  const std::size_t n = 8000;
  const Matrix x = random_matrix(rng, n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0) * x(i, 0);
  Dataset d;
  d.x = x;
  d.y = y;
  d.feature_names = default_feature_names(2);
  const auto parts = split(d, {{0.5, 0.25, 0.25}, 3});
  RunConfig c = default_config(EnsembleMode::Boosting);
  c.j2_max = 1;
  auto r = train_axnn(c, parts.train, parts.valid);
  r.ensemble.learners.resize(r.ensemble.stage_boundary);
  const auto t = decompose(r.ensemble, parts.test.x);
  const auto curve = effect_curve(r.ensemble, t, *t.find(GroupKind::Main, {0}), 101);
  // Compare to x1^2 minus its mean over the same reference data.
  double ref_mean = 0.0;
  for (std::size_t i = 0; i < parts.test.rows(); ++i) ref_mean += parts.test.x(i, 0) * parts.test.x(i, 0);
  ref_mean /= static_cast<double>(parts.test.rows());
  double ss = 0.0;
  for (std::size_t i = 0; i < curve.grid_x.size(); ++i) {
    const double want = curve.grid_x[i] * curve.grid_x[i] - ref_mean;
    ss += (curve.values[i] - want) * (curve.values[i] - want);
  }
  CHECK(std::sqrt(ss / static_cast<double>(curve.grid_x.size())) < 0.05);
}

TEST_CASE("correlating effects with true components") {
  EffectTable t;
  t.x = Matrix(4, 1);
  EffectGroup g;
  g.values = {1.0, 2.0, 0.0, -3.0};
  t.groups = {g};
  std::vector<Component> comps{{"same", {1.0, 2.0, 0.0, -3.0}},
                               {"flat", {5.0, 5.0, 5.0, 5.0}},
                               {"other", {0.3, -1.0, 2.0, 0.0}}};
  auto m = correlate_effects(t, comps);
  REQUIRE(m.size() == 1);
  CHECK(m[0].component == "same");
  CHECK(m[0].r == doctest::Approx(1.0));
  comps[0].values = {-1.0, -2.0, 0.0, 3.0};
  m = correlate_effects(t, comps);
  CHECK(m[0].component == "same");
  CHECK(m[0].r == doctest::Approx(-1.0));
  const std::vector<Component> short_comp{{"short", {1.0}}};
  CHECK_THROWS_AS(correlate_effects(t, short_comp), ShapeError);
}

TEST_CASE("group naming") {
  EffectGroup g;
  g.kind = GroupKind::Interaction;
  g.members = {0, 3};
  const std::vector<std::string> names{"a", "b", "c", "d"};
  CHECK(group_id(g, names) == "int_a_d");
  CHECK(group_members(g, names) == "a;d");
  g.kind = GroupKind::Main;
  g.members = {2};
  CHECK(group_id(g, {}) == "main_x3");
  g.kind = GroupKind::Null;
  g.members = {};
  CHECK(group_id(g, names) == "null");
}

}  // TEST_SUITE
