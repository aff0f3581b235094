#include "axnn/loss.hpp"

#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

std::string to_string(LossKind kind) { return kind == LossKind::Squared ? "squared" : "logistic"; }

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "squared") return LossKind::Squared;
  if (name == "logistic") return LossKind::Logistic;
  throw InvalidArgumentError(fmt::format("unknown loss '{}' (expected squared|logistic)", name));
}

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

double loss_value(LossKind kind, double f, double y) {
  if (kind == LossKind::Squared) {
    const double r = f - y;
    return r * r;
  }
  // log(1 + e^f) - y f, evaluated without overflow.
  return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f))) - y * f;
}

double loss_derivative(LossKind kind, double f, double y) {
  if (kind == LossKind::Squared) return 2.0 * (f - y);
  return sigmoid(f) - y;
}

double mean_loss(LossKind kind, std::span<const double> f, std::span<const double> y) {
  if (f.size() != y.size()) {
    throw ShapeError(fmt::format("loss: {} predictions for {} targets", f.size(), y.size()));
  }
  if (f.empty()) throw EmptyDataError("loss over an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += loss_value(kind, f[i], y[i]);
  return total / static_cast<double>(f.size());
}

}  // namespace axnn
