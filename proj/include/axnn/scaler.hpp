#pragma once

#include <span>
#include <string>
#include <vector>

#include "axnn/matrix.hpp"

namespace axnn {

/// Per-covariate standardisation fitted on training data.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t size() const noexcept { return means.size(); }
  bool operator==(const Scaler&) const = default;
};

/// Population mean and standard deviation per column. A column whose
/// standard deviation is <= 1e-12 raises DegenerateFeatureError naming it.
Scaler fit_scaler(const Matrix& x, std::span<const std::string> column_names = {});
Matrix apply_scaler(const Scaler& scaler, const Matrix& x);
Matrix unscale(const Scaler& scaler, const Matrix& z);

}  // namespace axnn
