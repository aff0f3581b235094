#include "axnn/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "axnn/errors.hpp"
#include "axnn/log.hpp"
#include "axnn/loss.hpp"
#include "axnn/scaler.hpp"

namespace axnn {

std::string to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::Boosting: return "boosting";
    case EnsembleMode::Stacking: return "stacking";
    case EnsembleMode::OneStage: return "one-stage";
  }
  return "?";
}

EnsembleMode ensemble_mode_from_string(const std::string& name) {
  if (name == "boosting") return EnsembleMode::Boosting;
  if (name == "stacking") return EnsembleMode::Stacking;
  if (name == "one-stage") return EnsembleMode::OneStage;
  throw InvalidArgumentError(
      fmt::format("unknown mode '{}' (expected boosting|stacking|one-stage)", name));
}

RunConfig default_config(EnsembleMode mode) {
  RunConfig c;
  c.mode = mode;
  if (mode == EnsembleMode::Stacking) {
    c.stage1_seed = {LearnerKind::GAMnet, 0, {{10}}};
    c.stage2_seed = {LearnerKind::XNN, 15, {{10}}};
  }
  return c;
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  auto check_seed = [&](const char* name, const LearnerSpec& s, LearnerKind kind) {
    if (s.kind != kind) out.push_back(fmt::format("{}: must be a {} spec", name, to_string(kind)));
    if (s.subnet.hidden_widths.empty()) out.push_back(fmt::format("{}.widths: needs at least one layer", name));
    for (std::size_t w : s.subnet.hidden_widths)
      if (w == 0) out.push_back(fmt::format("{}.widths: every width must be >= 1", name));
    if (kind == LearnerKind::XNN && s.num_ridges == 0) out.push_back(fmt::format("{}.k: must be >= 1", name));
  };
  if (j1_max == 0) out.emplace_back("j1_max: must be >= 1");
  if (j2_max == 0) out.emplace_back("j2_max: must be >= 1");
  check_seed("stage1_seed", stage1_seed, LearnerKind::GAMnet);
  check_seed("stage2_seed", stage2_seed, LearnerKind::XNN);
  if (width_increment == 0) out.emplace_back("width_increment: must be >= 1");
  if (epochs_per_iteration == 0) out.emplace_back("epochs_per_iteration: must be >= 1");
  if (batch_size == 0) out.emplace_back("batch_size: must be >= 1");
  if (!(optimizer.learning_rate > 0.0)) out.emplace_back("optimizer.learning_rate: must be > 0");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0)) out.emplace_back("optimizer.beta1: must be in [0, 1)");
  if (!(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) out.emplace_back("optimizer.beta2: must be in [0, 1)");
  if (!(optimizer.epsilon > 0.0)) out.emplace_back("optimizer.epsilon: must be > 0");
  if (!(lambda >= 0.0)) out.emplace_back("lambda: must be >= 0");
  if (!(beta >= 0.0)) out.emplace_back("beta: must be >= 0");
  if (patience == 0) out.emplace_back("patience: must be >= 1");
  if (!(rel_tol > 0.0)) out.emplace_back("rel_tol: must be > 0");
  if (mixture.max_iterations == 0) out.emplace_back("mixture.max_iterations: must be >= 1");
  if (!(mixture.rel_tol > 0.0)) out.emplace_back("mixture.rel_tol: must be > 0");
  return out;
}

std::vector<LearnerSpec> generate_candidates(const std::optional<LearnerSpec>& previous,
                                             const LearnerSpec& seed, std::size_t increment) {
  if (!previous) return {seed};
  LearnerSpec grown = *previous;
  for (auto& w : grown.subnet.hidden_widths) w += increment;
  return {*previous, grown};
}

bool stage_should_advance(std::span<const double> valid_losses, std::size_t patience,
                          double rel_tol, std::size_t max_iterations) {
  if (valid_losses.empty()) throw InvalidArgumentError("stage_should_advance: empty loss history");
  if (max_iterations > 0 && valid_losses.size() >= max_iterations) return true;
  double best = valid_losses.front();
  std::size_t stale = 0;
  for (std::size_t i = 1; i < valid_losses.size(); ++i) {
    if (valid_losses[i] < best - rel_tol * std::abs(best)) {
      best = valid_losses[i];
      stale = 0;
    } else {
      ++stale;
    }
  }
  return stale >= patience;
}

BaseLearner fit_base_learner(std::span<const double> fixed_offset, const LearnerSpec& candidate,
                             const Matrix& x, std::span<const double> y, const RunConfig& config,
                             const Rng& rng, const std::string& context) {
  const std::size_t n = x.rows();
  if (n == 0) throw EmptyDataError("cannot fit a learner on zero rows");
  if (fixed_offset.size() != n || y.size() != n) {
    throw ShapeError(fmt::format("fit: {} rows, {} offsets, {} targets", n, fixed_offset.size(), y.size()));
  }
  Rng init_rng = rng.child("init");
  Rng order_rng = rng.child("order");
  BaseLearner learner = new_learner(candidate, x.cols(), init_rng);
  AdamState state(learner.params.size(), config.optimizer,
                  context.empty() ? describe(learner.spec) : context);

  const LossKind loss = config.loss;
  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> upstream;

  for (std::size_t epoch = 0; epoch < config.epochs_per_iteration; ++epoch) {
    order_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      const Matrix xb = x.gather_rows(idx);
      const ForwardPass pass = forward_pass(learner, xb);
      const double scale = 1.0 / static_cast<double>(idx.size());
      upstream.resize(idx.size());
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double f = fixed_offset[idx[i]] + pass.output[i];
        batch_loss += loss_value(loss, f, y[idx[i]]);
        upstream[i] = loss_derivative(loss, f, y[idx[i]]) * scale;
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError(fmt::format("{}: non-finite training loss in epoch {}", state.context(), epoch + 1));
      }
      const LearnerGradients grads = backward(learner, xb, pass, upstream);
      const auto p_blocks = learner.params.blocks();
      const auto g_blocks = grads.params.blocks();
      adam_step(state, p_blocks, g_blocks);
    }
  }
  if (!learner.params.all_finite()) {
    throw DivergenceError(fmt::format("{}: parameters became non-finite", state.context()));
  }
  return learner;
}

namespace {

template <typename Task>
void run_parallel(std::size_t count, std::size_t workers, Task&& task) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t threads = std::min(workers, count);
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct CandidateFit {
  std::optional<BaseLearner> learner;
  std::vector<double> train_output;
  std::vector<double> weights;  // active learners then the candidate
  CandidateResult result;
  std::exception_ptr error;
};

double initial_offset(LossKind loss, std::span<const double> y) {
  double m = 0.0;
  for (double v : y) m += v;
  m /= static_cast<double>(y.size());
  if (loss == LossKind::Squared) return m;
  const double p = std::clamp(m, 1e-12, 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

void check_binary(const Dataset& d, const char* which) {
  for (double v : d.y) {
    if (v != 0.0 && v != 1.0) {
      throw SchemaError(fmt::format("logistic loss needs {} targets in {{0, 1}}, found {}", which, v));
    }
  }
}

}  // namespace

TrainResult train_axnn(const RunConfig& config, const Dataset& train, const Dataset& valid,
                       const TrainOptions& options) {
  if (auto problems = config.problems(); !problems.empty()) {
    throw InvalidArgumentError(fmt::format("invalid run configuration:\n  {}", fmt::join(problems, "\n  ")));
  }
  train.validate();
  valid.validate();
  if (train.rows() == 0 || valid.rows() == 0) throw EmptyDataError("training and validation sets must be non-empty");
  if (train.features() != valid.features()) {
    throw SchemaError(fmt::format("train has {} covariates but valid has {}", train.features(), valid.features()));
  }
  if (config.loss == LossKind::Logistic) {
    check_binary(train, "training");
    check_binary(valid, "validation");
  }

  const LossKind loss = config.loss;
  Ensemble ens;
  ens.link = loss == LossKind::Squared ? LinkKind::Identity : LinkKind::Logit;
  ens.scaler = fit_scaler(train.x, train.feature_names);
  ens.global_offset = initial_offset(loss, train.y);
  const Matrix xt = apply_scaler(ens.scaler, train.x);
  const Matrix xv = apply_scaler(ens.scaler, valid.x);
  const std::size_t nt = xt.rows();
  const std::size_t nv = xv.rows();

  const Rng root(config.seed);
  std::vector<std::vector<double>> out_train;
  std::vector<std::vector<double>> out_valid;
  std::vector<double> pred_train(nt, ens.global_offset);
  std::vector<double> pred_valid(nv, ens.global_offset);
  CandidateReport report;
  std::size_t iteration = 0;

  auto run_stage = [&](int stage) {
    const LearnerSpec& seed = stage == 1 ? config.stage1_seed : config.stage2_seed;
    const std::size_t max_iterations = stage == 1 ? config.j1_max : config.j2_max;
    const std::size_t first = ens.learners.size();
    // Fixed part for weight optimisation: the offset in stage 1, L in stage 2.
    const std::vector<double> base_train = pred_train;
    const std::vector<double> base_valid = pred_valid;
    double frozen_penalty = 0.0;
    for (const auto& l : ens.learners)
      frozen_penalty += weight_penalty(l, config.lambda, config.beta) * std::abs(l.mixture_weight);

    std::optional<LearnerSpec> previous;
    std::vector<double> history;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
      ++iteration;
      const auto specs = generate_candidates(previous, seed, config.width_increment);
      const std::vector<double>& fit_offset =
          config.mode == EnsembleMode::Stacking ? base_train : pred_train;
      const std::size_t active = ens.learners.size() - first;

      std::vector<CandidateFit> fits(specs.size());
      run_parallel(specs.size(), options.workers, [&](std::size_t c) {
        CandidateFit& fit = fits[c];
        fit.result.spec = specs[c];
        fit.result.spec.num_ridges = resolved_ridge_count(specs[c], xt.cols());
        try {
          const std::string context =
              fmt::format("stage {} iteration {} candidate {}", stage, it, c + 1);
          BaseLearner learner = fit_base_learner(fit_offset, specs[c], xt, train.y, config,
                                                 root.child("candidate", iteration, c), context);
          fit.result.parameter_count = learner.parameter_count();
          fit.train_output = forward(learner, xt);

          Matrix cols(nt, active + 1);
          std::vector<double> penalties, initial;
          for (std::size_t a = 0; a < active; ++a) {
            const auto& l = ens.learners[first + a];
            cols.set_column(a, out_train[first + a]);
            penalties.push_back(weight_penalty(l, config.lambda, config.beta));
            initial.push_back(l.mixture_weight);
          }
          cols.set_column(active, fit.train_output);
          penalties.push_back(weight_penalty(learner, config.lambda, config.beta));
          initial.push_back(1.0);
          fit.weights = optimize_mixture_weights(cols, train.y, base_train, loss, penalties,
                                                 initial, config.mixture);
          fit.result.objective =
              mixture_objective(cols, train.y, base_train, loss, penalties, fit.weights) + frozen_penalty;
          if (!std::isfinite(fit.result.objective)) {
            throw DivergenceError(fmt::format("{}: non-finite objective", context));
          }
          fit.learner = std::move(learner);
        } catch (const DivergenceError& e) {
          fit.result.failed = true;
          fit.result.failure = e.what();
        } catch (...) {
          fit.error = std::current_exception();
        }
      });
      for (auto& fit : fits)
        if (fit.error) std::rethrow_exception(fit.error);

      std::optional<std::size_t> best;
      for (std::size_t c = 0; c < fits.size(); ++c) {
        const auto& r = fits[c].result;
        if (r.failed) {
          log::warn("{}", r.failure);
          continue;
        }
        if (!best) {
          best = c;
          continue;
        }
        const auto& b = fits[*best].result;
        if (r.objective < b.objective ||
            (r.objective == b.objective && r.parameter_count < b.parameter_count)) {
          best = c;
        }
      }
      if (!best) {
        throw DivergenceError(fmt::format("stage {} iteration {}: every candidate diverged", stage, it));
      }

      CandidateFit& chosen = fits[*best];
      for (std::size_t a = 0; a < active; ++a) ens.learners[first + a].mixture_weight = chosen.weights[a];
      chosen.learner->mixture_weight = chosen.weights[active];
      out_valid.push_back(forward(*chosen.learner, xv));
      out_train.push_back(std::move(chosen.train_output));
      ens.learners.push_back(std::move(*chosen.learner));

      pred_train = base_train;
      pred_valid = base_valid;
      for (std::size_t j = first; j < ens.learners.size(); ++j) {
        const double w = ens.learners[j].mixture_weight;
        for (std::size_t i = 0; i < nt; ++i) pred_train[i] += w * out_train[j][i];
        for (std::size_t i = 0; i < nv; ++i) pred_valid[i] += w * out_valid[j][i];
      }

      IterationRecord record;
      record.iteration = iteration;
      record.stage = stage;
      record.selected = *best;
      for (auto& fit : fits) record.candidates.push_back(fit.result);
      for (const auto& l : ens.learners) record.weights.push_back(l.mixture_weight);
      record.train_loss = mean_loss(loss, pred_train, train.y);
      record.valid_loss = mean_loss(loss, pred_valid, valid.y);
      record.selected_objective = chosen.result.objective;
      log::info("stage {} iteration {}: {} objective={:.6g} train={:.6g} valid={:.6g}", stage, it,
                describe(record.chosen().spec), record.selected_objective, record.train_loss,
                record.valid_loss);
      history.push_back(record.valid_loss);
      report.iterations.push_back(std::move(record));

      previous = specs[*best];
      if (stage_should_advance(history, config.patience, config.rel_tol, max_iterations)) break;
    }
  };

  if (config.mode != EnsembleMode::OneStage) run_stage(1);
  ens.stage_boundary = ens.learners.size();
  run_stage(2);
  ens.validate();
  return {std::move(ens), std::move(report)};
}

void write_training_log(const CandidateReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << "iteration,stage,kind,widths,k,train_loss,valid_loss,selected_objective,w_norm\n";
  for (const auto& r : report.iterations) {
    const auto& spec = r.chosen().spec;
    double w_norm = 0.0;
    for (double w : r.weights) w_norm += std::abs(w);
    out << fmt::format("{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.iteration, r.stage,
                       to_string(spec.kind), fmt::join(spec.subnet.hidden_widths, ";"),
                       spec.num_ridges, r.train_loss, r.valid_loss, r.selected_objective, w_norm);
  }
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace axnn
