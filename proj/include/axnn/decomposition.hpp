#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axnn/dataset.hpp"
#include "axnn/ensemble.hpp"
#include "axnn/matrix.hpp"

namespace axnn {

/// Sorted 0-based covariate indices.
using ActiveSet = std::vector<std::size_t>;

/// Covariates whose |coefficient| exceeds theta. With `normalize` the vector
/// is scaled to unit L2 norm first; a zero vector gives the empty set.
ActiveSet active_set(std::span<const double> beta, double theta, bool normalize = true);

enum class GroupKind { Main, Interaction, Null };

std::string to_string(GroupKind kind);

struct RidgeRef {
  std::size_t learner = 0;
  std::size_t ridge = 0;

  auto operator<=>(const RidgeRef&) const = default;
};

struct EffectGroup {
  GroupKind kind = GroupKind::Main;
  ActiveSet members;  // one index for main effects, >= 2 for interactions, empty for null
  std::vector<RidgeRef> ridges;
  std::vector<double> values;  // centred over the reference data
  double center = 0.0;         // mean removed from the raw contribution
};

struct DecomposeOptions {
  double theta = 0.2;
  bool normalize = true;
};

/// offset + sum of group values reproduces predict_link on the reference data.
/// Groups are ordered: main effects by covariate, interactions by size then
/// members, then the null group (present only when some ridge is inactive).
struct EffectTable {
  Matrix x;  // raw reference data
  double offset = 0.0;
  std::vector<EffectGroup> groups;
  DecomposeOptions options;

  std::vector<double> total() const;
  std::optional<std::size_t> find(GroupKind kind, const ActiveSet& members) const;
  std::size_t ridge_count() const;
};

/// Active set of every ridge in learner order; stage-1 ridges map to their
/// own covariate.
std::vector<ActiveSet> ridge_active_sets(const Ensemble& ensemble, const DecomposeOptions& options);

EffectTable decompose(const Ensemble& ensemble, const Matrix& x_raw,
                      const DecomposeOptions& options = {});

/// "main_x3", "int_x1_x2", "null".
std::string group_id(const EffectGroup& group, std::span<const std::string> names);
/// "x3", "x1;x2", "".
std::string group_members(const EffectGroup& group, std::span<const std::string> names);

inline constexpr double kSignificanceCutoff = 0.001;

struct ImportanceEntry {
  std::size_t group = 0;  // index into EffectTable::groups
  double importance = 0.0;
  std::size_t rank = 0;  // 1-based
  bool significant = false;
};

struct ImportanceReport {
  std::vector<ImportanceEntry> entries;  // sorted by descending importance
  double prediction_variance = 0.0;

  const ImportanceEntry* for_group(std::size_t group) const;
};

/// var(group) / var(prediction), both sample variances. Throws
/// DegenerateModelError when the predictions are constant.
ImportanceReport importance(const EffectTable& table, std::span<const double> predictions);

struct SweepEntry {
  double theta = 0.0;
  EffectTable table;
  ImportanceReport report;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::vector<double> abs_coefficients;  // pooled normalised |beta| of stage-2 ridges
};

/// Thetas must be strictly ascending and positive.
SweepResult threshold_sweep(const Ensemble& ensemble, const Matrix& x_raw,
                            std::span<const double> thetas, bool normalize = true);

enum class CurveKind { Line, Surface, Scatter };

struct EffectCurve {
  CurveKind kind = CurveKind::Line;
  std::vector<std::size_t> members;
  std::vector<double> grid_x;  // Line and Surface
  std::vector<double> grid_y;  // Surface
  Matrix surface;              // grid_y.size() x grid_x.size()
  std::vector<double> values;  // Line: one per grid point; Scatter: one per sample
};

/// Evaluates a group of `table` on a grid over the observed range of its
/// covariates, with the other covariates held at their training means, minus
/// the group's centre. Groups with more than two members (and the null
/// group) return the per-sample values instead.
EffectCurve effect_curve(const Ensemble& ensemble, const EffectTable& table, std::size_t group,
                         std::size_t line_points = 100, std::size_t surface_points = 50);

struct EffectMatch {
  std::size_t group = 0;
  std::string component;  // empty when nothing could be compared
  double r = 0.0;
};

/// Best |r| true component per group; zero-variance components are skipped
/// with a warning.
std::vector<EffectMatch> correlate_effects(const EffectTable& table,
                                           std::span<const Component> components);

}  // namespace axnn
