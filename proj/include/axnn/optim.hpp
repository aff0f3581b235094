#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace axnn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

/// Moment accumulators for one parameter set. `context` names the owner in
/// divergence errors (e.g. "stage 2 iteration 4 candidate 1").
class AdamState {
 public:
  AdamState(std::size_t parameter_count, AdamConfig config, std::string context = {});

  std::size_t parameter_count() const noexcept { return first_.size(); }
  std::uint64_t steps() const noexcept { return steps_; }
  const AdamConfig& config() const noexcept { return config_; }
  const std::string& context() const noexcept { return context_; }

  std::span<const double> first_moment() const noexcept { return first_; }
  std::span<const double> second_moment() const noexcept { return second_; }

 private:
  friend void adam_step(AdamState&, std::span<const std::span<double>>,
                        std::span<const std::span<const double>>);

  AdamConfig config_;
  std::string context_;
  std::uint64_t steps_ = 0;
  std::vector<double> first_;
  std::vector<double> second_;
};

/// Bias-corrected adaptive-moment update over parameter blocks laid out
/// back to back. Throws DivergenceError on a non-finite gradient before
/// touching any parameter.
void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace axnn
