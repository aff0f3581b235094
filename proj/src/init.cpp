#include "axnn/init.hpp"

#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

namespace {

void check_fans(std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) {
    throw InvalidArchitectureError(
        fmt::format("layer fan-in and fan-out must be >= 1 (got {} -> {})", fan_in, fan_out));
  }
}

}  // namespace

LayerInit init_layer(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  check_fans(fan_in, fan_out);
  LayerInit out{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0)};
  const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (double& w : out.weights.values()) w = sd * rng.normal();
  return out;
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  check_fans(fan_in, fan_out);
  Matrix w(fan_out, fan_in);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  return w;
}

}  // namespace axnn
