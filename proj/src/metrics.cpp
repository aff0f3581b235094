#include "axnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.empty()) throw EmptyDataError(fmt::format("{}: empty input", what));
  if (a.size() != b.size()) {
    throw ShapeError(fmt::format("{}: {} targets but {} predictions", what, a.size(), b.size()));
  }
}

void check_binary(std::span<const double> y, const char* what) {
  for (double v : y) {
    if (v != 0.0 && v != 1.0) {
      throw SchemaError(fmt::format("{}: binary targets must be 0 or 1, found {}", what, v));
    }
  }
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) throw EmptyDataError("mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, "pearson");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double r = y_true[i] - y_pred[i];
    s += r * r;
  }
  return s / static_cast<double>(y_true.size());
}

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "r2");
  const double m = mean(y_true);
  double var = 0.0;
  for (double v : y_true) var += (v - m) * (v - m);
  var /= static_cast<double>(y_true.size());
  if (var == 0.0) throw DegenerateModelError("r2: target has zero variance");
  return 1.0 - mse(y_true, y_pred) / var;
}

double auc(std::span<const double> y_true, std::span<const double> scores) {
  check_pair(y_true, scores, "auc");
  check_binary(y_true, "auc");
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average 1-based ranks across tied scores.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double positives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y_true[i] == 1.0) {
      positives += 1.0;
      rank_sum += rank[i];
    }
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw SchemaError("auc: needs both positive and negative examples");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double logloss(std::span<const double> y_true, std::span<const double> probabilities) {
  check_pair(y_true, probabilities, "logloss");
  check_binary(y_true, "logloss");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double p = std::clamp(probabilities[i], 1e-12, 1.0 - 1e-12);
    s += y_true[i] * std::log(p) + (1.0 - y_true[i]) * std::log(1.0 - p);
  }
  return -s / static_cast<double>(y_true.size());
}

RegressionMetrics regression_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  return {mse(y_true, y_pred), r2_score(y_true, y_pred)};
}

BinaryMetrics binary_metrics(std::span<const double> y_true, std::span<const double> probabilities) {
  return {auc(y_true, probabilities), logloss(y_true, probabilities)};
}

}  // namespace axnn
