#pragma once

#include <cstddef>
#include <vector>

#include "axnn/matrix.hpp"
#include "axnn/rng.hpp"

namespace axnn {

struct LayerInit {
  Matrix weights;  // fan_out x fan_in
  std::vector<double> bias;
};

/// He-normal weights (variance 2 / fan_in) and a zero bias, for ReLU layers.
LayerInit init_layer(std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Glorot-uniform weights on +-sqrt(6 / (fan_in + fan_out)), for linear layers.
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace axnn
