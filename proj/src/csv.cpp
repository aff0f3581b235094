#include "axnn/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(fmt::format("'{}' is empty", path.string()));
  for (auto f : split_fields(line)) t.header.emplace_back(f);
  t.columns.resize(t.header.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != t.header.size()) {
      throw SchemaError(fmt::format("'{}': row {} has {} fields but the header has {}",
                                    path.string(), row, fields.size(), t.header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw ParseError(fmt::format("'{}': non-numeric cell '{}' at row {}, column '{}'",
                                     path.string(), fields[c], row, t.header[c]));
      }
      t.columns[c].push_back(v);
    }
  }
  return t;
}

std::size_t find_column(const Table& t, const std::string& name, const std::filesystem::path& path) {
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == name) return c;
  throw SchemaError(fmt::format("'{}' has no column named '{}'", path.string(), name));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

Dataset read_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const Table t = read_table(path);
  const std::size_t target = find_column(t, schema.target, path);
  std::vector<std::size_t> feature_cols;
  if (schema.features.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (c != target) feature_cols.push_back(c);
  } else {
    for (const auto& name : schema.features) feature_cols.push_back(find_column(t, name, path));
  }
  const std::size_t n = t.columns[target].size();
  Dataset data;
  data.target_name = schema.target;
  data.task = schema.task.value_or(Task::Regression);
  data.y = t.columns[target];
  data.x = Matrix(n, feature_cols.size());
  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    data.feature_names.push_back(t.header[feature_cols[j]]);
    data.x.set_column(j, t.columns[feature_cols[j]]);
  }
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  auto out = open_out(path);
  for (const auto& name : data.feature_names) out << name << ',';
  out << data.target_name << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (double v : data.x.row(i)) out << format_double(v) << ',';
    out << format_double(data.y[i]) << '\n';
  }
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

void write_components_csv(const Dataset& data, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& c : data.components) out << c.name << ',';
  out << "f\n";
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double f = 0.0;
    for (const auto& c : data.components) {
      out << format_double(c.values[i]) << ',';
      f += c.values[i];
    }
    out << format_double(f) << '\n';
  }
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<Component> read_components_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  std::vector<Component> out;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == "f") continue;
    out.push_back({t.header[c], t.columns[c]});
  }
  return out;
}

}  // namespace axnn
