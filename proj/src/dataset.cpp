#include "axnn/dataset.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

std::string to_string(Task task) { return task == Task::Regression ? "regression" : "binary"; }

std::vector<std::string> default_feature_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t c = 0; c < p; ++c) names.push_back(fmt::format("x{}", c + 1));
  return names;
}

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw ShapeError(fmt::format("dataset has {} rows of covariates but {} targets", x.rows(), y.size()));
  }
  if (feature_names.size() != x.cols()) {
    throw SchemaError(fmt::format("dataset has {} covariates but {} feature names", x.cols(),
                                  feature_names.size()));
  }
  if (task == Task::Binary) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw SchemaError(fmt::format("binary target must be 0 or 1; row {} has {}", i + 1, y[i]));
      }
    }
  }
  for (const auto& c : components) {
    if (c.values.size() != y.size()) {
      throw ShapeError(fmt::format("component '{}' has {} values for {} rows", c.name,
                                   c.values.size(), y.size()));
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.x = x.gather_rows(rows);
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(y[r]);
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.task = task;
  for (const auto& c : components) {
    Component sub{c.name, {}};
    sub.values.reserve(rows.size());
    for (std::size_t r : rows) sub.values.push_back(c.values[r]);
    out.components.push_back(std::move(sub));
  }
  return out;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  double total = 0.0;
  for (double f : spec.fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw InvalidArgumentError(fmt::format("split fraction {} is outside (0, 1)", f));
    }
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgumentError(fmt::format("split fractions sum to {}, not 1", total));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng(spec.seed).child("split");
  rng.shuffle(order);

  const auto n_train = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::llround(spec.fractions[0] * static_cast<double>(n))));
  const auto n_valid = std::min<std::size_t>(
      n - n_train,
      static_cast<std::size_t>(std::llround(spec.fractions[1] * static_cast<double>(n))));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  return out;
}

SplitData split(const Dataset& data, const SplitSpec& spec) {
  SplitData out;
  out.indices = split_indices(data.rows(), spec);
  out.train = data.subset(out.indices.train);
  out.valid = data.subset(out.indices.valid);
  out.test = data.subset(out.indices.test);
  return out;
}

}  // namespace axnn
