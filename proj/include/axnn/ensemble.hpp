#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "axnn/loss.hpp"
#include "axnn/matrix.hpp"
#include "axnn/net.hpp"
#include "axnn/scaler.hpp"

namespace axnn {

enum class LinkKind { Identity, Logit };

std::string to_string(LinkKind link);
LinkKind link_kind_from_string(const std::string& name);
LossKind loss_for(LinkKind link);

/// Fitted AxNN model. Learners [0, stage_boundary) are GAMnets, the rest xNNs.
/// Learners see standardised covariates; predict_* take raw covariates.
struct Ensemble {
  std::vector<BaseLearner> learners;
  std::size_t stage_boundary = 0;
  LinkKind link = LinkKind::Identity;
  Scaler scaler;
  double global_offset = 0.0;

  std::size_t num_inputs() const noexcept { return scaler.size(); }

  /// global_offset + sum_j w_j h_j(scaled x), accumulated in learner order.
  std::vector<double> predict_link(const Matrix& x_raw) const;
  /// predict_link for identity, sigmoid of it for logit.
  std::vector<double> predict_response(const Matrix& x_raw) const;

  /// Throws InvariantViolationError / ShapeError if the stage partition,
  /// scaler or learner shapes are inconsistent.
  void validate() const;

  bool operator==(const Ensemble&) const = default;
};

/// r(h) = sqrt(trainable parameter count).
double complexity(const BaseLearner& learner);
/// Per-learner |w| penalty lambda * r(h) + beta.
double weight_penalty(const BaseLearner& learner, double lambda, double beta);

/// (1/N) sum_i Phi(prediction_i, y_i) + sum_j (lambda r(h_j) + beta) |w_j|,
/// with Phi implied by the link.
double objective(const Ensemble& ensemble, const Matrix& x_raw, std::span<const double> y,
                 double lambda, double beta);

}  // namespace axnn
