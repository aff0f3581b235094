#include "axnn/ensemble.hpp"

#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

std::string to_string(LinkKind link) { return link == LinkKind::Identity ? "identity" : "logit"; }

LinkKind link_kind_from_string(const std::string& name) {
  if (name == "identity") return LinkKind::Identity;
  if (name == "logit") return LinkKind::Logit;
  throw InvalidArgumentError(fmt::format("unknown link '{}' (expected identity|logit)", name));
}

LossKind loss_for(LinkKind link) {
  return link == LinkKind::Identity ? LossKind::Squared : LossKind::Logistic;
}

std::vector<double> Ensemble::predict_link(const Matrix& x_raw) const {
  const Matrix x = apply_scaler(scaler, x_raw);
  std::vector<double> out(x.rows(), global_offset);
  for (const auto& learner : learners) {
    const auto h = forward(learner, x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += learner.mixture_weight * h[i];
  }
  return out;
}

std::vector<double> Ensemble::predict_response(const Matrix& x_raw) const {
  auto f = predict_link(x_raw);
  if (link == LinkKind::Logit)
    for (double& v : f) v = sigmoid(v);
  return f;
}

void Ensemble::validate() const {
  if (scaler.means.size() != scaler.stds.size()) {
    throw ShapeError("scaler means and stds differ in length");
  }
  for (std::size_t c = 0; c < scaler.stds.size(); ++c) {
    if (!(scaler.stds[c] > 0.0)) {
      throw InvariantViolationError(fmt::format("scaler std of covariate {} is not positive", c + 1));
    }
  }
  if (stage_boundary > learners.size()) {
    throw InvariantViolationError(fmt::format("stage boundary {} exceeds {} learners",
                                              stage_boundary, learners.size()));
  }
  for (std::size_t j = 0; j < learners.size(); ++j) {
    const auto expected = j < stage_boundary ? LearnerKind::GAMnet : LearnerKind::XNN;
    if (learners[j].spec.kind != expected) {
      throw InvariantViolationError(fmt::format(
          "learner {} is {} but the stage boundary is {} (learners 1..{} must be GAMnets, the rest xNNs)",
          j + 1, to_string(learners[j].spec.kind), stage_boundary, stage_boundary));
    }
    if (learners[j].num_inputs != scaler.size()) {
      throw ShapeError(fmt::format("learner {} takes {} covariates but the scaler has {}", j + 1,
                                   learners[j].num_inputs, scaler.size()));
    }
    axnn::validate(learners[j]);
  }
}

double complexity(const BaseLearner& learner) {
  return std::sqrt(static_cast<double>(learner.parameter_count()));
}

double weight_penalty(const BaseLearner& learner, double lambda, double beta) {
  return lambda * complexity(learner) + beta;
}

double objective(const Ensemble& ensemble, const Matrix& x_raw, std::span<const double> y,
                 double lambda, double beta) {
  if (x_raw.rows() == 0) throw EmptyDataError("objective over an empty sample");
  const auto f = ensemble.predict_link(x_raw);
  double value = mean_loss(loss_for(ensemble.link), f, y);
  for (const auto& learner : ensemble.learners)
    value += weight_penalty(learner, lambda, beta) * std::abs(learner.mixture_weight);
  return value;
}

}  // namespace axnn
