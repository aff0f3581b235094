#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axnn/dataset.hpp"
#include "axnn/ensemble.hpp"
#include "axnn/mixture.hpp"
#include "axnn/net.hpp"
#include "axnn/optim.hpp"
#include "axnn/rng.hpp"

namespace axnn {

/// Boosting fits each learner against the frozen ensemble's prediction;
/// stacking fits each learner against the response alone (plus the frozen
/// stage-1 sum in stage 2); one-stage skips the GAMnet stage and boosts xNNs.
enum class EnsembleMode { Boosting, Stacking, OneStage };

std::string to_string(EnsembleMode mode);
EnsembleMode ensemble_mode_from_string(const std::string& name);

struct RunConfig {
  EnsembleMode mode = EnsembleMode::Boosting;
  LossKind loss = LossKind::Squared;
  std::size_t j1_max = 10;  // max GAMnet iterations
  std::size_t j2_max = 20;  // max xNN iterations
  LearnerSpec stage1_seed{LearnerKind::GAMnet, 0, {{5}}};
  LearnerSpec stage2_seed{LearnerKind::XNN, 2, {{4}}};
  std::size_t width_increment = 1;
  std::size_t epochs_per_iteration = 30;
  std::size_t batch_size = 256;
  AdamConfig optimizer;
  double lambda = 0.0;  // weight on r(h) in the |w| penalty
  double beta = 1e-5;   // constant |w| penalty
  std::size_t patience = 2;
  double rel_tol = 1e-3;
  MixtureOptions mixture;
  std::uint64_t seed = 0;

  /// One message per invalid field; empty when the config is usable.
  std::vector<std::string> problems() const;
  bool operator==(const RunConfig&) const = default;
};

/// Defaults for a mode: weak seeds (GAMnet [5], xNN K=2 [4]) for boosting
/// and one-stage, strong seeds (GAMnet [10], xNN K=15 [10]) for stacking.
RunConfig default_config(EnsembleMode mode);

struct CandidateResult {
  LearnerSpec spec;
  std::size_t parameter_count = 0;
  bool failed = false;
  std::string failure;
  double objective = 0.0;  // penalised objective after weight re-optimisation

  bool operator==(const CandidateResult&) const = default;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based, global across stages
  int stage = 1;
  std::vector<CandidateResult> candidates;
  std::size_t selected = 0;
  std::vector<double> weights;  // all mixture weights after this iteration
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double selected_objective = 0.0;

  const CandidateResult& chosen() const { return candidates[selected]; }
  bool operator==(const IterationRecord&) const = default;
};

struct CandidateReport {
  std::vector<IterationRecord> iterations;
  bool operator==(const CandidateReport&) const = default;
};

struct TrainResult {
  Ensemble ensemble;
  CandidateReport report;
};

struct TrainOptions {
  std::size_t workers = 1;  // parallel candidate fits; results do not depend on it
};

/// First iteration of a stage: just the seed. Afterwards: the previous
/// selection and the same depth with every hidden width grown by `increment`.
std::vector<LearnerSpec> generate_candidates(const std::optional<LearnerSpec>& previous,
                                             const LearnerSpec& seed, std::size_t increment = 1);

/// Mini-batch training of a fresh learner on (1/N) sum Phi(offset_i + h(x_i), y_i).
/// `x` must already be standardised. Throws DivergenceError on a non-finite
/// loss or gradient.
BaseLearner fit_base_learner(std::span<const double> fixed_offset, const LearnerSpec& candidate,
                             const Matrix& x, std::span<const double> y, const RunConfig& config,
                             const Rng& rng, const std::string& context = {});

/// True once the best loss has gone `patience` consecutive iterations without
/// a relative improvement of at least rel_tol, or when the history reaches
/// max_iterations (0 disables that cap).
bool stage_should_advance(std::span<const double> valid_losses, std::size_t patience,
                          double rel_tol, std::size_t max_iterations = 0);

TrainResult train_axnn(const RunConfig& config, const Dataset& train, const Dataset& valid,
                       const TrainOptions& options = {});

/// One row per iteration: iteration, stage, kind, widths, k, train_loss,
/// valid_loss, selected_objective, w_norm.
void write_training_log(const CandidateReport& report, const std::filesystem::path& path);

/// Run configuration as a JSON document and back. Parsing starts from
/// `base` and raises InvalidArgumentError listing every bad or unknown field.
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text, const RunConfig& base);

}  // namespace axnn
