#include "axnn/optim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

AdamState::AdamState(std::size_t parameter_count, AdamConfig config, std::string context)
    : config_(config),
      context_(std::move(context)),
      first_(parameter_count, 0.0),
      second_(parameter_count, 0.0) {}

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError(fmt::format("adam_step: {} parameter blocks but {} gradient blocks",
                                 params.size(), grads.size()));
  }
  std::size_t total = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size()) {
      throw ShapeError(fmt::format("adam_step: block {} has {} parameters but {} gradients", b,
                                   params[b].size(), grads[b].size()));
    }
    for (std::size_t i = 0; i < grads[b].size(); ++i) {
      if (!std::isfinite(grads[b][i])) {
        throw DivergenceError(fmt::format("non-finite gradient in {} at optimizer step {}",
                                          state.context_.empty() ? "learner" : state.context_,
                                          state.steps_ + 1));
      }
    }
    total += params[b].size();
  }
  if (total != state.parameter_count()) {
    throw ShapeError(fmt::format("adam_step: state holds {} parameters, got {}",
                                 state.parameter_count(), total));
  }

  const AdamConfig& c = state.config_;
  state.steps_ += 1;
  const double t = static_cast<double>(state.steps_);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  std::size_t offset = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      double& m = state.first_[offset + i];
      double& v = state.second_[offset + i];
      m = c.beta1 * m + (1.0 - c.beta1) * g[i];
      v = c.beta2 * v + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
    offset += p.size();
  }
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  const std::span<double> p[] = {params};
  const std::span<const double> g[] = {grads};
  adam_step(state, p, g);
}

}  // namespace axnn
