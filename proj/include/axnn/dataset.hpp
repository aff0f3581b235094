#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "axnn/matrix.hpp"

namespace axnn {

enum class Task { Regression, Binary };

std::string to_string(Task task);

/// A named additive term of a known generating function, evaluated per sample.
struct Component {
  std::string name;
  std::vector<double> values;

  bool operator==(const Component&) const = default;
};

struct Dataset {
  Matrix x;
  std::vector<double> y;
  std::vector<std::string> feature_names;
  std::string target_name = "y";
  Task task = Task::Regression;
  /// Noiseless additive terms; empty for external data.
  std::vector<Component> components;

  std::size_t rows() const noexcept { return x.rows(); }
  std::size_t features() const noexcept { return x.cols(); }

  /// Throws SchemaError/ShapeError when row counts, names or labels disagree.
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& rows) const;

  bool operator==(const Dataset&) const = default;
};

std::vector<std::string> default_feature_names(std::size_t p);

struct SplitSpec {
  std::array<double, 3> fractions{0.5, 0.25, 0.25};  // train, valid, test
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train, valid, test;
};

struct SplitData {
  Dataset train, valid, test;
  SplitIndices indices;
};

/// Seeded shuffle followed by contiguous cuts; sizes are round(f * N) for
/// train and valid and the remainder for test.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);
SplitData split(const Dataset& data, const SplitSpec& spec);

}  // namespace axnn
