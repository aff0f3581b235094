#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "axnn/csv.hpp"
#include "axnn/decomposition.hpp"
#include "axnn/errors.hpp"
#include "axnn/generators.hpp"
#include "axnn/hash.hpp"
#include "axnn/log.hpp"
#include "axnn/metrics.hpp"
#include "axnn/model_io.hpp"
#include "axnn/svg.hpp"
#include "axnn/trainer.hpp"
#include "json.hpp"

#ifndef AXNN_VERSION
#define AXNN_VERSION "0.0.0"
#endif

namespace axnn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitData = 4;
constexpr int kExitIo = 5;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Numeric: return kExitNumeric;
    case ErrorCategory::Data: return kExitData;
    case ErrorCategory::Io: return kExitIo;
  }
  return 1;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgumentError(fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (out.empty()) throw InvalidArgumentError(fmt::format("{}: empty list", what));
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string example;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> noise;
  std::string out;
  std::string split;
};

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_filename(path.stem().string() + suffix);
  return p;
}

void write_with_components(const Dataset& d, const fs::path& path) {
  write_csv(d, path);
  write_components_csv(d, with_suffix(path, ".components.csv"));
}

int cmd_gen(const GenArgs& a) {
  const Benchmark b = benchmark_from_string(a.example);
  if (a.n == 0) throw InvalidArgumentError("--n must be positive");
  const double noise = a.noise.value_or(b == Benchmark::Simple ? 0.1 : 0.0);
  if (!(noise >= 0.0)) throw InvalidArgumentError("--noise must be non-negative");
  const Dataset data = generate(b, a.n, a.seed, noise);
  const fs::path out(a.out);
  ensure_parent(out);
  write_with_components(data, out);
  std::cout << fmt::format("wrote {} rows x {} covariates to {} (y mean {:.4f}, sd {:.4f})\n",
                           data.rows(), data.features(), out.string(), mean(data.y),
                           std::sqrt(sample_variance(data.y)));
  if (!a.split.empty()) {
    const auto f = parse_list(a.split, "--split");
    if (f.size() != 3) throw InvalidArgumentError("--split needs three fractions: train,valid,test");
    SplitSpec spec;
    spec.fractions = {f[0], f[1], f[2]};
    spec.seed = a.seed;
    const SplitData parts = split(data, spec);
    const std::pair<const char*, const Dataset*> named[] = {
        {".train.csv", &parts.train}, {".valid.csv", &parts.valid}, {".test.csv", &parts.test}};
    for (const auto& [suffix, d] : named) {
      const fs::path p = with_suffix(out, suffix);
      write_with_components(*d, p);
      std::cout << fmt::format("  {} rows -> {}\n", d->rows(), p.string());
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config;
  std::string train;
  std::string valid;
  std::string out;
  std::string log;
  std::string manifest;
  std::string mode;
  std::string loss;
  std::string target = "y";
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
};

json metrics_json(const Ensemble& e, const Dataset& d) {
  const auto p = e.predict_response(d.x);
  if (e.link == LinkKind::Logit) {
    const auto m = binary_metrics(d.y, p);
    return {{"auc", m.auc}, {"logloss", m.logloss}};
  }
  const auto m = regression_metrics(d.y, p);
  return {{"mse", m.mse}, {"r2", m.r2}};
}

int cmd_train(const TrainArgs& a) {
  const auto t_start = Clock::now();
  EnsembleMode mode = EnsembleMode::Boosting;
  std::optional<json> file_doc;
  std::string config_text;
  if (!a.config.empty()) {
    config_text = read_text(a.config);
    try {
      file_doc = json::parse(config_text);
    } catch (const json::parse_error& e) {
      throw InvalidArgumentError(fmt::format("config '{}' is not valid JSON: {}", a.config, e.what()));
    }
    if (file_doc->is_object() && file_doc->contains("mode") && file_doc->at("mode").is_string()) {
      mode = ensemble_mode_from_string(file_doc->at("mode").get<std::string>());
    }
  }
  if (!a.mode.empty()) mode = ensemble_mode_from_string(a.mode);
  // Defaults follow the mode; the file overrides them and flags override the file.
  RunConfig config = default_config(mode);
  if (file_doc) config = run_config_from_json(config_text, config);
  config.mode = mode;
  if (!a.loss.empty()) config.loss = loss_kind_from_string(a.loss);
  if (a.seed) config.seed = *a.seed;
  if (const auto problems = config.problems(); !problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InvalidArgumentError(msg);
  }
  if (a.workers == 0) throw InvalidArgumentError("--workers must be at least 1");

  CsvSchema schema;
  schema.target = a.target;
  schema.task = config.loss == LossKind::Logistic ? Task::Binary : Task::Regression;
  const Dataset train = read_csv(a.train, schema);
  schema.features = train.feature_names;
  const Dataset valid = read_csv(a.valid, schema);
  const double t_load = seconds_since(t_start);

  const auto t_fit = Clock::now();
  const TrainResult result = train_axnn(config, train, valid, {a.workers});
  const double t_train = seconds_since(t_fit);

  const auto t_write = Clock::now();
  const fs::path model_path(a.out);
  ensure_parent(model_path);
  save_model(result.ensemble, model_path);
  const fs::path log_path = a.log.empty() ? with_suffix(model_path, ".log.csv") : fs::path(a.log);
  ensure_parent(log_path);
  write_training_log(result.report, log_path);
  const double t_write_s = seconds_since(t_write);

  const fs::path manifest_path =
      a.manifest.empty() ? with_suffix(model_path, ".manifest.json") : fs::path(a.manifest);
  json manifest;
  manifest["tool"] = "axnn";
  manifest["version"] = AXNN_VERSION;
  manifest["config"] = json::parse(run_config_to_json(config));
  manifest["workers"] = a.workers;
  manifest["target"] = a.target;
  manifest["features"] = train.feature_names;
  manifest["inputs"] = {
      {"train", {{"path", a.train}, {"sha256", sha256_file(a.train)}}},
      {"valid", {{"path", a.valid}, {"sha256", sha256_file(a.valid)}}}};
  if (!a.config.empty()) manifest["inputs"]["config"] = {{"path", a.config}, {"sha256", sha256_hex(config_text)}};
  manifest["outputs"] = {
      {"model", {{"path", model_path.string()}, {"sha256", sha256_file(model_path)}}},
      {"log", {{"path", log_path.string()}, {"sha256", sha256_file(log_path)}}}};
  manifest["timings_seconds"] = {{"load", t_load}, {"train", t_train}, {"write", t_write_s}};
  manifest["metrics"] = {{"train", metrics_json(result.ensemble, train)},
                         {"valid", metrics_json(result.ensemble, valid)}};
  manifest["learners"] = {{"stage1", result.ensemble.stage_boundary},
                          {"total", result.ensemble.learners.size()}};
  ensure_parent(manifest_path);
  svg::write_file(manifest_path, manifest.dump(2) + "\n");

  std::cout << fmt::format("trained {} learners ({} GAMnet, {} xNN) in {:.1f}s; valid {}\n",
                           result.ensemble.learners.size(), result.ensemble.stage_boundary,
                           result.ensemble.learners.size() - result.ensemble.stage_boundary, t_train,
                           manifest["metrics"]["valid"].dump());
  std::cout << fmt::format("model {}\n", model_path.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model;
  std::string data;
  std::string metrics;
  std::string out;
  std::string target = "y";
};

int cmd_eval(const EvalArgs& a) {
  const Ensemble e = load_model(a.model);
  const bool binary = e.link == LinkKind::Logit;
  std::vector<std::string> wanted;
  if (a.metrics.empty()) {
    wanted = binary ? std::vector<std::string>{"auc", "logloss"} : std::vector<std::string>{"mse", "r2"};
  } else {
    std::stringstream ss(a.metrics);
    std::string m;
    while (std::getline(ss, m, ',')) wanted.push_back(m);
  }
  for (const auto& m : wanted) {
    const bool ok = binary ? (m == "auc" || m == "logloss") : (m == "mse" || m == "r2");
    if (!ok) {
      throw UnsupportedMetricError(fmt::format("metric '{}' is not available for a {} model", m,
                                               binary ? "binary" : "regression"));
    }
  }
  CsvSchema schema;
  schema.target = a.target;
  schema.task = binary ? Task::Binary : Task::Regression;
  const Dataset d = read_csv(a.data, schema);
  if (d.features() != e.num_inputs()) {
    throw SchemaError(fmt::format("data has {} covariates but the model expects {}", d.features(),
                                  e.num_inputs()));
  }
  const auto p = e.predict_response(d.x);
  json out = json::object();
  for (const auto& m : wanted) {
    if (m == "mse") out[m] = mse(d.y, p);
    if (m == "r2") out[m] = r2_score(d.y, p);
    if (m == "auc") out[m] = auc(d.y, p);
    if (m == "logloss") out[m] = logloss(d.y, p);
  }
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!a.out.empty()) {
    ensure_parent(a.out);
    svg::write_file(a.out, text);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string components;
  std::string target = "y";
  double theta = 0.2;
  std::string sweep;
  bool no_normalize = false;
};

std::string bool_text(bool b) { return b ? "true" : "false"; }

void write_importance_csv(const fs::path& path, const EffectTable& table, const ImportanceReport& report,
                          std::span<const std::string> names, std::optional<double> theta) {
  std::ostringstream out;
  if (theta) out << "theta,";
  out << "group_id,type,members,importance,rank,significant\n";
  for (const auto& e : report.entries) {
    const auto& g = table.groups[e.group];
    if (theta) out << format_double(*theta) << ",";
    out << group_id(g, names) << "," << to_string(g.kind) << "," << group_members(g, names) << ","
        << format_double(e.importance) << "," << e.rank << "," << bool_text(e.significant) << "\n";
  }
  svg::write_file(path, out.str());
}

void write_effect(const fs::path& dir, const std::string& id, const EffectTable& table,
                  const EffectGroup& group, const EffectCurve& curve,
                  std::span<const std::string> names, bool plot) {
  std::ostringstream csv;
  if (curve.kind == CurveKind::Line) {
    const std::string& v = names[curve.members[0]];
    csv << v << ",effect\n";
    for (std::size_t i = 0; i < curve.grid_x.size(); ++i)
      csv << format_double(curve.grid_x[i]) << "," << format_double(curve.values[i]) << "\n";
    if (plot) {
      svg::write_file(dir / (id + ".svg"),
                      svg::line_chart(fmt::format("Main effect of {}", v), v, "effect", curve.grid_x, curve.values));
    }
  } else if (curve.kind == CurveKind::Surface) {
    const std::string& va = names[curve.members[0]];
    const std::string& vb = names[curve.members[1]];
    csv << va << "," << vb << ",effect\n";
    for (std::size_t iy = 0; iy < curve.grid_y.size(); ++iy)
      for (std::size_t ix = 0; ix < curve.grid_x.size(); ++ix)
        csv << format_double(curve.grid_x[ix]) << "," << format_double(curve.grid_y[iy]) << ","
            << format_double(curve.surface(iy, ix)) << "\n";
    if (plot) {
      svg::write_file(dir / (id + ".svg"),
                      svg::heatmap(fmt::format("Interaction {} x {}", va, vb), va, vb, curve.grid_x,
                                   curve.grid_y, curve.surface));
    }
  } else {
    for (auto p : group.members) csv << names[p] << ",";
    csv << "effect\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      for (auto p : group.members) csv << format_double(table.x(i, p)) << ",";
      csv << format_double(curve.values[i]) << "\n";
    }
  }
  svg::write_file(dir / (id + ".csv"), csv.str());
}

int cmd_decompose(const DecomposeArgs& a) {
  if (!(a.theta > 0.0)) throw InvalidArgumentError(fmt::format("--theta must be positive, got {}", a.theta));
  std::vector<double> thetas;
  if (!a.sweep.empty()) thetas = parse_list(a.sweep, "--sweep");

  const Ensemble e = load_model(a.model);
  CsvSchema schema;
  schema.target = a.target;
  schema.task = e.link == LinkKind::Logit ? Task::Binary : Task::Regression;
  const Dataset d = read_csv(a.data, schema);
  if (d.features() != e.num_inputs()) {
    throw SchemaError(fmt::format("data has {} covariates but the model expects {}", d.features(),
                                  e.num_inputs()));
  }
  const auto& names = d.feature_names;
  const DecomposeOptions options{a.theta, !a.no_normalize};
  const EffectTable table = decompose(e, d.x, options);
  const auto predictions = e.predict_link(d.x);
  const ImportanceReport report = importance(table, predictions);

  const fs::path out(a.out);
  const fs::path effects = out / "effects";
  ensure_dir(effects);
  write_importance_csv(out / "importance.csv", table, report, names, std::nullopt);

  std::vector<std::string> bar_labels;
  std::vector<double> bar_values;
  for (const auto& entry : report.entries) {
    const auto& g = table.groups[entry.group];
    const std::string id = group_id(g, names);
    if (entry.significant) {
      bar_labels.push_back(g.kind == GroupKind::Null ? "null" : group_members(g, names));
      bar_values.push_back(entry.importance);
    }
    if (g.kind == GroupKind::Null) continue;
    const EffectCurve curve = effect_curve(e, table, entry.group);
    write_effect(effects, id, table, g, curve, names, entry.significant);
  }
  svg::write_file(out / "importance.svg", svg::bar_chart("Effect importance", bar_labels, bar_values));

  const SweepResult hist = threshold_sweep(e, d.x, std::vector<double>{}, options.normalize);
  double hist_hi = 1.0;
  for (double v : hist.abs_coefficients) hist_hi = std::max(hist_hi, v);
  svg::write_file(out / "beta_hist.svg",
                  svg::histogram(options.normalize ? "Normalised |projection coefficient|" : "|projection coefficient|",
                                 "|beta|", hist.abs_coefficients, 20, 0.0, hist_hi));

  if (!thetas.empty()) {
    const SweepResult sweep = threshold_sweep(e, d.x, thetas, options.normalize);
    std::ostringstream csv;
    csv << "theta,group_id,type,members,importance,rank,significant\n";
    for (const auto& s : sweep.entries) {
      for (const auto& entry : s.report.entries) {
        const auto& g = s.table.groups[entry.group];
        csv << format_double(s.theta) << "," << group_id(g, names) << "," << to_string(g.kind) << ","
            << group_members(g, names) << "," << format_double(entry.importance) << "," << entry.rank
            << "," << bool_text(entry.significant) << "\n";
      }
    }
    svg::write_file(out / "sweep.csv", csv.str());
  }

  if (!a.components.empty()) {
    const auto components = read_components_csv(a.components);
    std::vector<Component> terms;
    for (const auto& c : components)
      if (c.name != "f") terms.push_back(c);
    const auto matches = correlate_effects(table, terms);
    std::ostringstream csv;
    csv << "group_id,component,r\n";
    for (const auto& m : matches)
      csv << group_id(table.groups[m.group], names) << "," << m.component << "," << format_double(m.r) << "\n";
    svg::write_file(out / "correlations.csv", csv.str());
  }

  std::cout << fmt::format("{} groups at theta {} (offset {:.6g})\n", table.groups.size(), a.theta, table.offset);
  for (const auto& entry : report.entries) {
    const auto& g = table.groups[entry.group];
    std::cout << fmt::format("  {:>3}  {:<24} {:.6f}{}\n", entry.rank, group_id(g, names), entry.importance,
                             entry.significant ? "" : "  (insignificant)");
  }
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Adaptive explainable neural network ensembles"};
  app.set_version_flag("--version", AXNN_VERSION);
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic benchmark dataset");
  g->add_option("--example", gen.example, "simple, ex1, ex2, ex3 or ex4")->required();
  g->add_option("--n", gen.n, "Number of samples")->required();
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--noise", gen.noise, "Gaussian noise sd (default 0.1 for simple, 0 otherwise)");
  g->add_option("--out", gen.out, "Output CSV")->required();
  g->add_option("--split", gen.split, "Also write train/valid/test files, e.g. 0.5,0.25,0.25");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train an AxNN ensemble");
  t->add_option("--config", train.config, "JSON run configuration");
  t->add_option("--train", train.train, "Training CSV")->required();
  t->add_option("--valid", train.valid, "Validation CSV")->required();
  t->add_option("--out", train.out, "Model JSON to write")->required();
  t->add_option("--log", train.log, "Iteration log CSV (default <model>.log.csv)");
  t->add_option("--manifest", train.manifest, "Run manifest (default <model>.manifest.json)");
  t->add_option("--mode", train.mode, "boosting, stacking or one-stage");
  t->add_option("--loss", train.loss, "squared or logistic");
  t->add_option("--target", train.target, "Target column");
  t->add_option("--seed", train.seed, "Training seed");
  t->add_option("--workers", train.workers, "Parallel candidate fits");

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset");
  ev->add_option("--model", eval.model, "Model JSON")->required();
  ev->add_option("--data", eval.data, "Data CSV")->required();
  ev->add_option("--metrics", eval.metrics, "Comma separated: mse,r2 or auc,logloss");
  ev->add_option("--out", eval.out, "Metrics JSON to write");
  ev->add_option("--target", eval.target, "Target column");

  DecomposeArgs dec;
  auto* dc = app.add_subcommand("decompose", "Main-effect and interaction decomposition report");
  dc->add_option("--model", dec.model, "Model JSON")->required();
  dc->add_option("--data", dec.data, "Reference data CSV")->required();
  dc->add_option("--out", dec.out, "Report directory")->required();
  dc->add_option("--theta", dec.theta, "Active-set threshold");
  dc->add_option("--sweep", dec.sweep, "Comma separated ascending thresholds");
  dc->add_option("--components", dec.components, "True components CSV for correlation");
  dc->add_option("--target", dec.target, "Target column");
  dc->add_flag("--no-normalize", dec.no_normalize, "Threshold raw projection coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*t) return cmd_train(train);
    if (*ev) return cmd_eval(eval);
    if (*dc) return cmd_decompose(dec);
  } catch (const Error& e) {
    log::write(log::Level::Error, e.what());
    return exit_code(e.category());
  } catch (const std::bad_alloc&) {
    log::write(log::Level::Error, "out of memory");
    return kExitNumeric;
  } catch (const std::exception& e) {
    log::write(log::Level::Error, e.what());
    return 1;
  }
  return kExitUsage;
}

}  // namespace axnn::cli
