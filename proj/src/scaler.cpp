#include "axnn/scaler.hpp"

#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

Scaler fit_scaler(const Matrix& x, std::span<const std::string> column_names) {
  if (x.rows() == 0) throw EmptyDataError("cannot fit a scaler on zero rows");
  const std::size_t p = x.cols();
  const double n = static_cast<double>(x.rows());
  Scaler s{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < p; ++c) s.means[c] += x(i, c);
  for (double& m : s.means) m /= n;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < p; ++c) {
      const double d = x(i, c) - s.means[c];
      s.stds[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    s.stds[c] = std::sqrt(s.stds[c] / n);
    if (!(s.stds[c] > 1e-12)) {
      const std::string name =
          c < column_names.size() ? column_names[c] : fmt::format("column {}", c + 1);
      throw DegenerateFeatureError(fmt::format("feature '{}' is constant on the training data", name));
    }
  }
  return s;
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& x) {
  if (x.cols() != scaler.size()) {
    throw SchemaError(fmt::format("scaler was fitted on {} columns but data has {}",
                                  scaler.size(), x.cols()));
  }
  Matrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c)
      z(i, c) = (x(i, c) - scaler.means[c]) / scaler.stds[c];
  return z;
}

Matrix unscale(const Scaler& scaler, const Matrix& z) {
  if (z.cols() != scaler.size()) {
    throw SchemaError(fmt::format("scaler was fitted on {} columns but data has {}",
                                  scaler.size(), z.cols()));
  }
  Matrix x(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t c = 0; c < z.cols(); ++c)
      x(i, c) = z(i, c) * scaler.stds[c] + scaler.means[c];
  return x;
}

}  // namespace axnn
