#include "axnn/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "axnn/errors.hpp"
#include "axnn/log.hpp"
#include "axnn/metrics.hpp"
#include "axnn/scaler.hpp"

namespace axnn {

ActiveSet active_set(std::span<const double> beta, double theta, bool normalize) {
  if (!(theta > 0.0)) throw InvalidArgumentError(fmt::format("theta must be positive, got {}", theta));
  double scale = 1.0;
  if (normalize) {
    double norm = 0.0;
    for (double b : beta) norm += b * b;
    norm = std::sqrt(norm);
    if (norm == 0.0) return {};
    scale = 1.0 / norm;
  }
  ActiveSet out;
  for (std::size_t p = 0; p < beta.size(); ++p)
    if (std::abs(beta[p]) * scale > theta) out.push_back(p);
  return out;
}

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Main: return "main";
    case GroupKind::Interaction: return "interaction";
    case GroupKind::Null: return "null";
  }
  return "unknown";
}

std::vector<double> EffectTable::total() const {
  std::vector<double> out(x.rows(), offset);
  for (const auto& g : groups)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g.values[i];
  return out;
}

std::optional<std::size_t> EffectTable::find(GroupKind kind, const ActiveSet& members) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].kind == kind && groups[g].members == members) return g;
  return std::nullopt;
}

std::size_t EffectTable::ridge_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.ridges.size();
  return n;
}

std::vector<ActiveSet> ridge_active_sets(const Ensemble& ensemble, const DecomposeOptions& options) {
  std::vector<ActiveSet> out;
  for (std::size_t j = 0; j < ensemble.learners.size(); ++j) {
    const auto& l = ensemble.learners[j];
    for (std::size_t k = 0; k < l.num_ridges(); ++k) {
      if (l.spec.kind == LearnerKind::GAMnet) {
        out.push_back({k});
      } else {
        out.push_back(active_set(l.params.projections.row(k), options.theta, options.normalize));
      }
    }
  }
  return out;
}

namespace {

struct GroupKey {
  GroupKind kind;
  ActiveSet members;

  bool operator<(const GroupKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (members.size() != o.members.size()) return members.size() < o.members.size();
    return members < o.members;
  }
};

GroupKey key_for(const ActiveSet& set) {
  if (set.empty()) return {GroupKind::Null, {}};
  if (set.size() == 1) return {GroupKind::Main, set};
  return {GroupKind::Interaction, set};
}

void check_schema(const Ensemble& ensemble, const Matrix& x_raw) {
  if (x_raw.cols() != ensemble.num_inputs()) {
    throw SchemaError(fmt::format("data has {} covariates but the model expects {}", x_raw.cols(),
                                  ensemble.num_inputs()));
  }
}

// Per-sample raw contribution of the listed ridges, accumulated in ridge order.
std::vector<double> group_contribution(const Ensemble& ensemble, const std::vector<RidgeRef>& ridges,
                                       const Matrix& x_scaled) {
  std::vector<double> out(x_scaled.rows(), 0.0);
  std::size_t i = 0;
  while (i < ridges.size()) {
    const std::size_t j = ridges[i].learner;
    const auto& learner = ensemble.learners[j];
    const Matrix cols = forward_ridges(learner, x_scaled);
    for (; i < ridges.size() && ridges[i].learner == j; ++i) {
      const std::size_t k = ridges[i].ridge;
      for (std::size_t n = 0; n < out.size(); ++n) out[n] += learner.mixture_weight * cols(n, k);
    }
  }
  return out;
}

}  // namespace

EffectTable decompose(const Ensemble& ensemble, const Matrix& x_raw, const DecomposeOptions& options) {
  if (!(options.theta > 0.0)) {
    throw InvalidArgumentError(fmt::format("theta must be positive, got {}", options.theta));
  }
  if (options.theta < 0.1 || options.theta > 0.5) {
    log::warn("theta {} is outside the usual range [0.1, 0.5]", options.theta);
  }
  check_schema(ensemble, x_raw);
  const Matrix x = apply_scaler(ensemble.scaler, x_raw);
  const std::size_t n = x.rows();

  EffectTable table;
  table.x = x_raw;
  table.options = options;
  table.offset = ensemble.global_offset;

  std::map<GroupKey, std::vector<double>> values;
  std::map<GroupKey, std::vector<RidgeRef>> refs;
  for (std::size_t j = 0; j < ensemble.learners.size(); ++j) {
    const auto& l = ensemble.learners[j];
    table.offset += l.mixture_weight * l.params.combination_bias;
    const Matrix cols = forward_ridges(l, x);
    for (std::size_t k = 0; k < l.num_ridges(); ++k) {
      const ActiveSet set = l.spec.kind == LearnerKind::GAMnet
                                ? ActiveSet{k}
                                : active_set(l.params.projections.row(k), options.theta, options.normalize);
      const GroupKey key = key_for(set);
      auto& v = values[key];
      if (v.empty()) v.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) v[i] += l.mixture_weight * cols(i, k);
      refs[key].push_back({j, k});
    }
  }

  for (auto& [key, v] : values) {
    EffectGroup g;
    g.kind = key.kind;
    g.members = key.members;
    g.ridges = std::move(refs[key]);
    g.center = n == 0 ? 0.0 : mean(v);
    for (double& e : v) e -= g.center;
    g.values = std::move(v);
    table.offset += g.center;
    table.groups.push_back(std::move(g));
  }
  return table;
}

std::string group_id(const EffectGroup& group, std::span<const std::string> names) {
  auto name = [&](std::size_t p) { return p < names.size() ? names[p] : fmt::format("x{}", p + 1); };
  switch (group.kind) {
    case GroupKind::Main: return "main_" + name(group.members.front());
    case GroupKind::Interaction: {
      std::string id = "int";
      for (auto p : group.members) id += "_" + name(p);
      return id;
    }
    case GroupKind::Null: return "null";
  }
  return "unknown";
}

std::string group_members(const EffectGroup& group, std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < group.members.size(); ++i) {
    const auto p = group.members[i];
    if (i > 0) out += ";";
    out += p < names.size() ? names[p] : fmt::format("x{}", p + 1);
  }
  return out;
}

const ImportanceEntry* ImportanceReport::for_group(std::size_t group) const {
  for (const auto& e : entries)
    if (e.group == group) return &e;
  return nullptr;
}

ImportanceReport importance(const EffectTable& table, std::span<const double> predictions) {
  if (predictions.size() != table.x.rows()) {
    throw ShapeError(fmt::format("{} predictions for {} reference samples", predictions.size(),
                                 table.x.rows()));
  }
  ImportanceReport report;
  report.prediction_variance = sample_variance(predictions);
  if (!(report.prediction_variance > 0.0)) {
    throw DegenerateModelError("predictions are constant on the reference data; importances are undefined");
  }
  for (std::size_t g = 0; g < table.groups.size(); ++g) {
    const double v = sample_variance(table.groups[g].values) / report.prediction_variance;
    report.entries.push_back({g, v, 0, v >= kSignificanceCutoff});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const auto& a, const auto& b) { return a.importance > b.importance; });
  for (std::size_t r = 0; r < report.entries.size(); ++r) report.entries[r].rank = r + 1;
  return report;
}

SweepResult threshold_sweep(const Ensemble& ensemble, const Matrix& x_raw,
                            std::span<const double> thetas, bool normalize) {
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    if (!(thetas[t] > 0.0)) throw InvalidArgumentError(fmt::format("theta must be positive, got {}", thetas[t]));
    if (t > 0 && !(thetas[t] > thetas[t - 1])) {
      throw InvalidArgumentError("sweep thresholds must be strictly ascending");
    }
  }
  SweepResult result;
  const auto predictions = ensemble.predict_link(x_raw);
  for (double theta : thetas) {
    SweepEntry entry{theta, decompose(ensemble, x_raw, {theta, normalize}), {}};
    entry.report = importance(entry.table, predictions);
    result.entries.push_back(std::move(entry));
  }
  for (std::size_t j = ensemble.stage_boundary; j < ensemble.learners.size(); ++j) {
    const auto& proj = ensemble.learners[j].params.projections;
    for (std::size_t k = 0; k < proj.rows(); ++k) {
      const auto row = proj.row(k);
      double norm = 0.0;
      for (double b : row) norm += b * b;
      norm = std::sqrt(norm);
      const double scale = normalize && norm > 0.0 ? 1.0 / norm : 1.0;
      for (double b : row) result.abs_coefficients.push_back(std::abs(b) * scale);
    }
  }
  return result;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

std::vector<double> column_range(const Matrix& x, std::size_t c, std::size_t count) {
  if (x.rows() == 0) throw EmptyDataError("effect curves need at least one reference sample");
  double lo = x(0, c), hi = x(0, c);
  for (std::size_t i = 1; i < x.rows(); ++i) {
    lo = std::min(lo, x(i, c));
    hi = std::max(hi, x(i, c));
  }
  return linspace(lo, hi, count);
}

}  // namespace

EffectCurve effect_curve(const Ensemble& ensemble, const EffectTable& table, std::size_t group,
                         std::size_t line_points, std::size_t surface_points) {
  if (group >= table.groups.size()) {
    throw InvalidArgumentError(fmt::format("unknown effect group {} (table has {})", group,
                                           table.groups.size()));
  }
  if (line_points == 0 || surface_points == 0) {
    throw InvalidArgumentError("effect curve grids need at least one point");
  }
  const EffectGroup& g = table.groups[group];
  EffectCurve curve;
  curve.members = g.members;
  const std::size_t p = ensemble.num_inputs();

  if (g.members.empty() || g.members.size() > 2) {
    curve.kind = CurveKind::Scatter;
    curve.values = g.values;
    return curve;
  }

  if (g.members.size() == 1) {
    curve.kind = CurveKind::Line;
    curve.grid_x = column_range(table.x, g.members[0], line_points);
    Matrix grid(line_points, p);
    for (std::size_t i = 0; i < line_points; ++i) {
      for (std::size_t c = 0; c < p; ++c) grid(i, c) = ensemble.scaler.means[c];
      grid(i, g.members[0]) = curve.grid_x[i];
    }
    curve.values = group_contribution(ensemble, g.ridges, apply_scaler(ensemble.scaler, grid));
    for (double& v : curve.values) v -= g.center;
    return curve;
  }

  curve.kind = CurveKind::Surface;
  const std::size_t a = g.members[0], b = g.members[1];
  curve.grid_x = column_range(table.x, a, surface_points);
  curve.grid_y = column_range(table.x, b, surface_points);
  Matrix grid(surface_points * surface_points, p);
  for (std::size_t iy = 0; iy < surface_points; ++iy) {
    for (std::size_t ix = 0; ix < surface_points; ++ix) {
      const std::size_t r = iy * surface_points + ix;
      for (std::size_t c = 0; c < p; ++c) grid(r, c) = ensemble.scaler.means[c];
      grid(r, a) = curve.grid_x[ix];
      grid(r, b) = curve.grid_y[iy];
    }
  }
  const auto v = group_contribution(ensemble, g.ridges, apply_scaler(ensemble.scaler, grid));
  curve.surface = Matrix(surface_points, surface_points);
  for (std::size_t iy = 0; iy < surface_points; ++iy)
    for (std::size_t ix = 0; ix < surface_points; ++ix)
      curve.surface(iy, ix) = v[iy * surface_points + ix] - g.center;
  return curve;
}

std::vector<EffectMatch> correlate_effects(const EffectTable& table,
                                           std::span<const Component> components) {
  std::vector<const Component*> usable;
  for (const auto& c : components) {
    if (c.values.size() != table.x.rows()) {
      throw ShapeError(fmt::format("component '{}' has {} values for {} reference samples", c.name,
                                   c.values.size(), table.x.rows()));
    }
    if (!(sample_variance(c.values) > 0.0)) {
      log::warn("component '{}' has zero variance on the reference data; skipped", c.name);
      continue;
    }
    usable.push_back(&c);
  }
  std::vector<EffectMatch> out;
  for (std::size_t g = 0; g < table.groups.size(); ++g) {
    EffectMatch m{g, {}, 0.0};
    if (sample_variance(table.groups[g].values) > 0.0) {
      for (const Component* c : usable) {
        const double r = pearson(table.groups[g].values, c->values);
        if (m.component.empty() || std::abs(r) > std::abs(m.r)) {
          m.component = c->name;
          m.r = r;
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace axnn
