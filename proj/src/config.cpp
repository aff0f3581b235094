#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "axnn/errors.hpp"
#include "axnn/trainer.hpp"
#include "json.hpp"

namespace axnn {

using nlohmann::json;

namespace {

json spec_to_json(const LearnerSpec& spec, bool with_k) {
  json j;
  if (with_k) j["k"] = spec.num_ridges;
  j["widths"] = spec.subnet.hidden_widths;
  return j;
}

// Reads fields one by one, recording every problem instead of stopping at
// the first.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void read(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const std::string name = path.empty() ? key : path + "." + key;
    try {
      const json& v = obj.at(key);
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          errors_.push_back(fmt::format("{}: expected a non-negative integer", name));
          return;
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) {
          errors_.push_back(fmt::format("{}: expected a number", name));
          return;
        }
      }
      out = v.get<T>();
    } catch (const json::exception&) {
      errors_.push_back(fmt::format("{}: wrong type", name));
    }
  }

  void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
      if (!known.count(key)) {
        errors_.push_back(fmt::format("{}: unknown field", path.empty() ? key : path + "." + key));
      }
    }
  }

  void read_spec(const json& obj, const char* key, LearnerSpec& spec, bool with_k) {
    if (!obj.contains(key)) return;
    const json& s = obj.at(key);
    if (!s.is_object()) {
      errors_.push_back(fmt::format("{}: expected an object", key));
      return;
    }
    if (with_k) read(s, key, "k", spec.num_ridges);
    if (s.contains("widths")) {
      const json& w = s.at("widths");
      bool ok = w.is_array();
      if (ok)
        for (const auto& e : w) ok = ok && e.is_number_integer() && e.get<long long>() >= 1;
      if (ok) {
        spec.subnet.hidden_widths = w.get<std::vector<std::size_t>>();
      } else {
        errors_.push_back(fmt::format("{}.widths: expected an array of integers >= 1", key));
      }
    }
    unknown_keys(s, key, with_k ? std::set<std::string>{"k", "widths"} : std::set<std::string>{"widths"});
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["loss"] = to_string(c.loss);
  j["j1_max"] = c.j1_max;
  j["j2_max"] = c.j2_max;
  j["stage1_seed"] = spec_to_json(c.stage1_seed, false);
  j["stage2_seed"] = spec_to_json(c.stage2_seed, true);
  j["width_increment"] = c.width_increment;
  j["epochs_per_iteration"] = c.epochs_per_iteration;
  j["batch_size"] = c.batch_size;
  j["optimizer"] = {{"learning_rate", c.optimizer.learning_rate},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"epsilon", c.optimizer.epsilon}};
  j["lambda"] = c.lambda;
  j["beta"] = c.beta;
  j["patience"] = c.patience;
  j["rel_tol"] = c.rel_tol;
  j["mixture"] = {{"max_iterations", c.mixture.max_iterations}, {"rel_tol", c.mixture.rel_tol}};
  j["seed"] = c.seed;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text, const RunConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(fmt::format("run configuration is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw InvalidArgumentError("run configuration must be a JSON object");

  RunConfig c = base;
  std::vector<std::string> errors;
  FieldReader r(errors);

  std::string mode = to_string(c.mode);
  std::string loss = to_string(c.loss);
  r.read(doc, "", "mode", mode);
  r.read(doc, "", "loss", loss);
  try {
    c.mode = ensemble_mode_from_string(mode);
  } catch (const Error& e) {
    errors.push_back(fmt::format("mode: {}", e.what()));
  }
  try {
    c.loss = loss_kind_from_string(loss);
  } catch (const Error& e) {
    errors.push_back(fmt::format("loss: {}", e.what()));
  }
  r.read(doc, "", "j1_max", c.j1_max);
  r.read(doc, "", "j2_max", c.j2_max);
  r.read_spec(doc, "stage1_seed", c.stage1_seed, false);
  r.read_spec(doc, "stage2_seed", c.stage2_seed, true);
  r.read(doc, "", "width_increment", c.width_increment);
  r.read(doc, "", "epochs_per_iteration", c.epochs_per_iteration);
  r.read(doc, "", "batch_size", c.batch_size);
  if (doc.contains("optimizer")) {
    const json& o = doc.at("optimizer");
    if (o.is_object()) {
      r.read(o, "optimizer", "learning_rate", c.optimizer.learning_rate);
      r.read(o, "optimizer", "beta1", c.optimizer.beta1);
      r.read(o, "optimizer", "beta2", c.optimizer.beta2);
      r.read(o, "optimizer", "epsilon", c.optimizer.epsilon);
      r.unknown_keys(o, "optimizer", {"learning_rate", "beta1", "beta2", "epsilon"});
    } else {
      errors.emplace_back("optimizer: expected an object");
    }
  }
  r.read(doc, "", "lambda", c.lambda);
  r.read(doc, "", "beta", c.beta);
  r.read(doc, "", "patience", c.patience);
  r.read(doc, "", "rel_tol", c.rel_tol);
  if (doc.contains("mixture")) {
    const json& m = doc.at("mixture");
    if (m.is_object()) {
      r.read(m, "mixture", "max_iterations", c.mixture.max_iterations);
      r.read(m, "mixture", "rel_tol", c.mixture.rel_tol);
      r.unknown_keys(m, "mixture", {"max_iterations", "rel_tol"});
    } else {
      errors.emplace_back("mixture: expected an object");
    }
  }
  r.read(doc, "", "seed", c.seed);
  r.unknown_keys(doc, "",
                 {"mode", "loss", "j1_max", "j2_max", "stage1_seed", "stage2_seed", "width_increment",
                  "epochs_per_iteration", "batch_size", "optimizer", "lambda", "beta", "patience",
                  "rel_tol", "mixture", "seed"});
  for (auto& p : c.problems()) errors.push_back(std::move(p));
  if (!errors.empty()) {
    throw InvalidArgumentError(fmt::format("invalid run configuration:\n  {}", fmt::join(errors, "\n  ")));
  }
  return c;
}

}  // namespace axnn
