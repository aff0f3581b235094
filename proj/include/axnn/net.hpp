#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "axnn/matrix.hpp"
#include "axnn/rng.hpp"

namespace axnn {

enum class LearnerKind { GAMnet, XNN };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

/// Hidden ReLU layer widths of one ridge subnetwork. The output unit is a
/// single bias-free linear neuron.
struct SubnetSpec {
  std::vector<std::size_t> hidden_widths;

  std::size_t depth() const noexcept { return hidden_widths.size(); }
  bool operator==(const SubnetSpec&) const = default;
};

/// Architecture of one base learner. For GAMnet, num_ridges is the number of
/// covariates (0 is accepted and resolved by new_learner).
struct LearnerSpec {
  LearnerKind kind = LearnerKind::GAMnet;
  std::size_t num_ridges = 0;
  SubnetSpec subnet;

  bool operator==(const LearnerSpec&) const = default;
};

std::string describe(const LearnerSpec& spec);
/// Throws InvalidArchitectureError when the spec cannot describe a learner on
/// `num_inputs` covariates.
void validate(const LearnerSpec& spec, std::size_t num_inputs);
std::size_t resolved_ridge_count(const LearnerSpec& spec, std::size_t num_inputs);
std::size_t parameter_count(const LearnerSpec& spec, std::size_t num_inputs);

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct RidgeNet {
  std::vector<DenseLayer> hidden;
  std::vector<double> output_weights;  // width of the last hidden layer

  bool operator==(const RidgeNet&) const = default;
};

/// Every trainable quantity of a learner. Gradients use the same type.
struct LearnerParams {
  Matrix projections;  // K x P for xNN; empty for GAMnet
  std::vector<RidgeNet> ridges;
  std::vector<double> combination_weights;
  double combination_bias = 0.0;

  /// Contiguous views in a fixed order: projections, then per ridge
  /// (layer weights, layer bias)..., output weights, then combination
  /// weights and bias.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  std::size_t size() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  LearnerParams zeros_like() const;
  bool all_finite() const;

  bool operator==(const LearnerParams&) const = default;
};

struct BaseLearner {
  LearnerSpec spec;  // num_ridges resolved
  std::size_t num_inputs = 0;
  LearnerParams params;
  double mixture_weight = 0.0;

  std::size_t num_ridges() const noexcept { return params.ridges.size(); }
  std::size_t parameter_count() const { return params.size(); }

  bool operator==(const BaseLearner&) const = default;
};

/// Consistency check of parameter shapes against the spec.
void validate(const BaseLearner& learner);

/// Starting value of every combination weight. Small, so a fresh learner is
/// close to the zero function and boosting starts from the current ensemble.
inline constexpr double kCombinationInit = 0.1;

BaseLearner new_learner(const LearnerSpec& spec, std::size_t num_inputs, Rng& rng);

/// Column k is combination_weight_k * g_k(input_k), where input_k is the
/// projection beta_k^T x (xNN) or covariate x_k (GAMnet).
Matrix forward_ridges(const BaseLearner& learner, const Matrix& x);

/// Row sums of forward_ridges plus the combination bias, summed in ridge order.
std::vector<double> forward(const BaseLearner& learner, const Matrix& x);

/// Intermediate values kept for backpropagation.
struct ForwardPass {
  Matrix ridge_inputs;                          // N x K
  std::vector<std::vector<Matrix>> activations;  // [ridge][layer], N x width
  Matrix ridge_outputs;                         // N x K, g_k before combination
  std::vector<double> output;                   // N
};

ForwardPass forward_pass(const BaseLearner& learner, const Matrix& x);

struct LearnerGradients {
  LearnerParams params;
  Matrix inputs;  // N x P; empty unless requested
};

/// Exact gradients of sum_i upstream_i * forward(learner, x_i). The ReLU
/// derivative at 0 is taken as 0.
LearnerGradients backward(const BaseLearner& learner, const Matrix& x,
                          std::span<const double> upstream, bool input_gradient = false);

LearnerGradients backward(const BaseLearner& learner, const Matrix& x, const ForwardPass& pass,
                          std::span<const double> upstream, bool input_gradient = false);

}  // namespace axnn
