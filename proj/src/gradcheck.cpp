#include "axnn/gradcheck.hpp"

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

std::vector<double> finite_diff_gradient(const std::function<double()>& loss,
                                         std::span<double> params, double h) {
  if (!(h > 0.0)) throw InvalidArgumentError(fmt::format("finite difference step must be > 0, got {}", h));
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& loss, std::vector<double> params,
    double h) {
  return finite_diff_gradient([&] { return loss(params); }, params, h);
}

}  // namespace axnn
