#pragma once

#include <span>
#include <string>

namespace axnn {

/// Phi in the training objective. Squared: (f - y)^2. Logistic: log-loss of
/// sigmoid(f) against y in {0, 1}, with f on the logit scale.
enum class LossKind { Squared, Logistic };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

double loss_value(LossKind kind, double f, double y);
/// d loss / d f.
double loss_derivative(LossKind kind, double f, double y);
double mean_loss(LossKind kind, std::span<const double> f, std::span<const double> y);

double sigmoid(double f);

}  // namespace axnn
