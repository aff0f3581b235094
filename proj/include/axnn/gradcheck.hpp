#pragma once

#include <functional>
#include <span>
#include <vector>

namespace axnn {

/// Central-difference gradient (f(p + h e_i) - f(p - h e_i)) / 2h for every
/// coordinate. `params` is perturbed in place and restored exactly.
std::vector<double> finite_diff_gradient(const std::function<double()>& loss,
                                         std::span<double> params, double h);

/// Convenience overload for losses that take the parameter vector.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& loss, std::vector<double> params,
    double h);

}  // namespace axnn
