#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "axnn/loss.hpp"
#include "axnn/matrix.hpp"

namespace axnn {

struct MixtureOptions {
  std::size_t max_iterations = 500;
  double rel_tol = 1e-8;

  bool operator==(const MixtureOptions&) const = default;
};

/// (1/N) sum_i Phi(offset_i + sum_j w_j C_ij, y_i) + sum_j penalty_j |w_j|.
double mixture_objective(const Matrix& outputs, std::span<const double> y,
                         std::span<const double> offset, LossKind loss,
                         std::span<const double> penalties, std::span<const double> weights);

/// Minimises mixture_objective over w (unconstrained sign) by monotone
/// accelerated proximal gradient with soft-thresholding. The step is 1/L
/// with L a Gershgorin bound on the smooth part's curvature, so the
/// returned weights never score worse than `initial` (zeros when empty).
std::vector<double> optimize_mixture_weights(const Matrix& outputs, std::span<const double> y,
                                             std::span<const double> offset, LossKind loss,
                                             std::span<const double> penalties,
                                             std::span<const double> initial = {},
                                             const MixtureOptions& options = {});

}  // namespace axnn
