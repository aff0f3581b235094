#pragma once

#include <span>

namespace axnn {

struct RegressionMetrics {
  double mse = 0.0;
  double r2 = 0.0;
};

struct BinaryMetrics {
  double auc = 0.0;
  double logloss = 0.0;
};

double mse(std::span<const double> y_true, std::span<const double> y_pred);
/// 1 - MSE / var(y_true), population variance.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);
/// Mann-Whitney rank statistic with average ranks for ties.
double auc(std::span<const double> y_true, std::span<const double> scores);
/// Probabilities are clipped to [1e-12, 1 - 1e-12].
double logloss(std::span<const double> y_true, std::span<const double> probabilities);

RegressionMetrics regression_metrics(std::span<const double> y_true, std::span<const double> y_pred);
BinaryMetrics binary_metrics(std::span<const double> y_true, std::span<const double> probabilities);

double mean(std::span<const double> v);
/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> v);
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace axnn
