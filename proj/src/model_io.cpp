#include "axnn/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "axnn/errors.hpp"
#include "json.hpp"

namespace axnn {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

json learner_to_json(const BaseLearner& l) {
  json j;
  j["kind"] = to_string(l.spec.kind);
  j["w"] = l.mixture_weight;
  j["spec"] = {{"k", l.spec.num_ridges}, {"widths", l.spec.subnet.hidden_widths}};
  if (l.spec.kind == LearnerKind::XNN) j["projections"] = matrix_to_json(l.params.projections);
  json ridges = json::array();
  for (const auto& ridge : l.params.ridges) {
    json layers = json::array();
    for (const auto& layer : ridge.hidden)
      layers.push_back({{"w", matrix_to_json(layer.weights)}, {"b", layer.bias}});
    // Output unit: 1 x width, bias-free.
    layers.push_back({{"w", json::array({ridge.output_weights})}, {"b", json::array()}});
    ridges.push_back({{"layers", layers}});
  }
  j["ridges"] = ridges;
  j["combination_weights"] = l.params.combination_weights;
  j["combination_bias"] = l.params.combination_bias;
  return j;
}

// Every structural lookup goes through these so that missing keys and wrong
// types surface as MalformedDocumentError.
const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw MalformedDocumentError(fmt::format("{}: missing field '{}'", where, key));
  }
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw MalformedDocumentError(fmt::format("{}: expected a number", where));
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw MalformedDocumentError(fmt::format("{}: expected a non-negative integer", where));
  }
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw MalformedDocumentError(fmt::format("{}: expected an array", where));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(number(e, where));
  return out;
}

Matrix matrix(const json& v, const std::string& where) {
  if (!v.is_array()) throw MalformedDocumentError(fmt::format("{}: expected an array of rows", where));
  if (v.empty()) return Matrix();
  std::vector<double> data;
  const std::size_t cols = v.at(0).is_array() ? v.at(0).size() : 0;
  for (const auto& row : v) {
    auto values = numbers(row, where);
    if (values.size() != cols) throw ShapeError(fmt::format("{}: ragged matrix rows", where));
    data.insert(data.end(), values.begin(), values.end());
  }
  return Matrix(v.size(), cols, std::move(data));
}

BaseLearner learner_from_json(const json& j, std::size_t index, std::size_t num_inputs) {
  const std::string where = fmt::format("learner {}", index + 1);
  BaseLearner l;
  const json& kind = field(j, "kind", where);
  if (!kind.is_string()) throw MalformedDocumentError(where + ": kind must be a string");
  try {
    l.spec.kind = learner_kind_from_string(kind.get<std::string>());
  } catch (const InvalidArgumentError& e) {
    throw MalformedDocumentError(fmt::format("{}: {}", where, e.what()));
  }
  l.mixture_weight = number(field(j, "w", where), where + ".w");
  const json& spec = field(j, "spec", where);
  l.spec.num_ridges = count(field(spec, "k", where + ".spec"), where + ".spec.k");
  const json& widths = field(spec, "widths", where + ".spec");
  if (!widths.is_array()) throw MalformedDocumentError(where + ".spec.widths: expected an array");
  for (const auto& w : widths) l.spec.subnet.hidden_widths.push_back(count(w, where + ".spec.widths"));
  l.num_inputs = num_inputs;

  if (l.spec.kind == LearnerKind::XNN) {
    l.params.projections = matrix(field(j, "projections", where), where + ".projections");
  } else if (j.contains("projections")) {
    throw ShapeError(where + ": GAMnet learners have no projection layer");
  }
  const json& ridges = field(j, "ridges", where);
  if (!ridges.is_array()) throw MalformedDocumentError(where + ".ridges: expected an array");
  for (std::size_t r = 0; r < ridges.size(); ++r) {
    const std::string rw = fmt::format("{} ridge {}", where, r + 1);
    const json& layers = field(ridges.at(r), "layers", rw);
    if (!layers.is_array() || layers.empty()) {
      throw MalformedDocumentError(rw + ".layers: expected a non-empty array");
    }
    RidgeNet ridge;
    for (std::size_t li = 0; li + 1 < layers.size(); ++li) {
      const std::string lw = fmt::format("{} layer {}", rw, li + 1);
      ridge.hidden.push_back({matrix(field(layers.at(li), "w", lw), lw + ".w"),
                              numbers(field(layers.at(li), "b", lw), lw + ".b")});
    }
    const std::string ow = rw + " output layer";
    const Matrix out = matrix(field(layers.back(), "w", ow), ow + ".w");
    const auto out_bias = numbers(field(layers.back(), "b", ow), ow + ".b");
    if (out.rows() != 1 || !out_bias.empty()) {
      throw ShapeError(ow + ": expected a single bias-free output unit");
    }
    ridge.output_weights.assign(out.values().begin(), out.values().end());
    l.params.ridges.push_back(std::move(ridge));
  }
  l.params.combination_weights = numbers(field(j, "combination_weights", where), where + ".combination_weights");
  l.params.combination_bias = number(field(j, "combination_bias", where), where + ".combination_bias");
  try {
    validate(l);
  } catch (const InvalidArchitectureError& e) {
    throw ShapeError(fmt::format("{}: {}", where, e.what()));
  }
  if (!l.params.all_finite()) throw MalformedDocumentError(where + ": non-finite parameter");
  return l;
}

}  // namespace

std::string model_to_json(const Ensemble& e) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["link"] = to_string(e.link);
  j["scaler"] = {{"means", e.scaler.means}, {"stds", e.scaler.stds}};
  j["global_offset"] = e.global_offset;
  j["j1"] = e.stage_boundary;
  json learners = json::array();
  for (const auto& l : e.learners) learners.push_back(learner_to_json(l));
  j["learners"] = learners;
  return j.dump(1) + "\n";
}

std::string stage1_fingerprint_json(const Ensemble& e) {
  json learners = json::array();
  for (std::size_t i = 0; i < e.stage_boundary && i < e.learners.size(); ++i)
    learners.push_back(learner_to_json(e.learners[i]));
  return learners.dump();
}

Ensemble model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedDocumentError(fmt::format("model document is not valid JSON: {}", e.what()));
  }
  const std::string where = "model";
  const std::size_t version = count(field(doc, "format_version", where), "format_version");
  if (version != static_cast<std::size_t>(kModelFormatVersion)) {
    throw VersionError(fmt::format("model format version {} is not supported (expected {})", version,
                                   kModelFormatVersion));
  }
  Ensemble e;
  const json& link = field(doc, "link", where);
  if (!link.is_string()) throw MalformedDocumentError("link: expected a string");
  try {
    e.link = link_kind_from_string(link.get<std::string>());
  } catch (const InvalidArgumentError& err) {
    throw MalformedDocumentError(err.what());
  }
  const json& scaler = field(doc, "scaler", where);
  e.scaler.means = numbers(field(scaler, "means", "scaler"), "scaler.means");
  e.scaler.stds = numbers(field(scaler, "stds", "scaler"), "scaler.stds");
  if (e.scaler.means.size() != e.scaler.stds.size()) {
    throw ShapeError("scaler means and stds differ in length");
  }
  e.global_offset = number(field(doc, "global_offset", where), "global_offset");
  e.stage_boundary = count(field(doc, "j1", where), "j1");
  const json& learners = field(doc, "learners", where);
  if (!learners.is_array()) throw MalformedDocumentError("learners: expected an array");
  for (std::size_t i = 0; i < learners.size(); ++i)
    e.learners.push_back(learner_from_json(learners.at(i), i, e.scaler.size()));
  e.validate();
  return e;
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
  const std::string text = model_to_json(ensemble);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace axnn
