#include "axnn/mixture.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn {

namespace {

void check_problem(const Matrix& outputs, std::span<const double> y, std::span<const double> offset,
                   std::span<const double> penalties) {
  const std::size_t n = outputs.rows();
  if (n == 0) throw EmptyDataError("mixture weights: no samples");
  if (y.size() != n || offset.size() != n) {
    throw ShapeError(fmt::format("mixture weights: {} output rows, {} targets, {} offsets", n,
                                 y.size(), offset.size()));
  }
  if (penalties.size() != outputs.cols()) {
    throw ShapeError(fmt::format("mixture weights: {} columns but {} penalties", outputs.cols(),
                                 penalties.size()));
  }
  for (std::size_t j = 0; j < outputs.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(outputs(i, j))) {
        throw DivergenceError(fmt::format("learner output column {} is non-finite at row {}", j + 1, i + 1));
      }
    }
  }
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double penalty_term(std::span<const double> penalties, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += penalties[j] * std::abs(w[j]);
  return s;
}

// Smooth part and its gradient for one loss kind.
class SmoothPart {
 public:
  SmoothPart(const Matrix& c, std::span<const double> y, std::span<const double> offset, LossKind loss)
      : c_(c), y_(y), offset_(offset), loss_(loss), j_(c.cols()) {
    const double n = static_cast<double>(c.rows());
    gram_ = Matrix(j_, j_);
    for (std::size_t i = 0; i < c.rows(); ++i) {
      auto row = c.row(i);
      for (std::size_t a = 0; a < j_; ++a)
        for (std::size_t b = 0; b < j_; ++b) gram_(a, b) += row[a] * row[b];
    }
    for (double& g : gram_.values()) g /= n;
    if (loss_ == LossKind::Squared) {
      rhs_.assign(j_, 0.0);
      for (std::size_t i = 0; i < c.rows(); ++i) {
        const double r = y[i] - offset[i];
        residual_energy_ += r * r;
        for (std::size_t a = 0; a < j_; ++a) rhs_[a] += c(i, a) * r;
      }
      for (double& v : rhs_) v /= n;
      residual_energy_ /= n;
    }
    double bound = 0.0;
    for (std::size_t a = 0; a < j_; ++a) {
      double row_sum = 0.0;
      for (std::size_t b = 0; b < j_; ++b) row_sum += std::abs(gram_(a, b));
      bound = std::max(bound, row_sum);
    }
    lipschitz_ = loss_ == LossKind::Squared ? 2.0 * bound : 0.25 * bound;
  }

  double lipschitz() const { return lipschitz_; }

  double value(std::span<const double> w) const {
    if (loss_ == LossKind::Squared) {
      // w'Gw - 2 b'w + r'r / N
      double v = residual_energy_;
      for (std::size_t a = 0; a < j_; ++a) {
        double gw = 0.0;
        for (std::size_t b = 0; b < j_; ++b) gw += gram_(a, b) * w[b];
        v += w[a] * (gw - 2.0 * rhs_[a]);
      }
      return v;
    }
    return mixture_objective(c_, y_, offset_, loss_, std::vector<double>(j_, 0.0), w);
  }

  std::vector<double> gradient(std::span<const double> w) const {
    std::vector<double> g(j_, 0.0);
    if (loss_ == LossKind::Squared) {
      for (std::size_t a = 0; a < j_; ++a) {
        double gw = 0.0;
        for (std::size_t b = 0; b < j_; ++b) gw += gram_(a, b) * w[b];
        g[a] = 2.0 * (gw - rhs_[a]);
      }
      return g;
    }
    const double n = static_cast<double>(c_.rows());
    for (std::size_t i = 0; i < c_.rows(); ++i) {
      auto row = c_.row(i);
      double f = offset_[i];
      for (std::size_t a = 0; a < j_; ++a) f += w[a] * row[a];
      const double d = loss_derivative(loss_, f, y_[i]);
      for (std::size_t a = 0; a < j_; ++a) g[a] += d * row[a];
    }
    for (double& v : g) v /= n;
    return g;
  }

 private:
  const Matrix& c_;
  std::span<const double> y_;
  std::span<const double> offset_;
  LossKind loss_;
  std::size_t j_;
  Matrix gram_;
  std::vector<double> rhs_;
  double residual_energy_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace

double mixture_objective(const Matrix& outputs, std::span<const double> y,
                         std::span<const double> offset, LossKind loss,
                         std::span<const double> penalties, std::span<const double> weights) {
  check_problem(outputs, y, offset, penalties);
  if (weights.size() != outputs.cols()) {
    throw ShapeError(fmt::format("mixture weights: {} columns but {} weights", outputs.cols(),
                                 weights.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    auto row = outputs.row(i);
    double f = offset[i];
    for (std::size_t j = 0; j < row.size(); ++j) f += weights[j] * row[j];
    total += loss_value(loss, f, y[i]);
  }
  return total / static_cast<double>(outputs.rows()) + penalty_term(penalties, weights);
}

std::vector<double> optimize_mixture_weights(const Matrix& outputs, std::span<const double> y,
                                             std::span<const double> offset, LossKind loss,
                                             std::span<const double> penalties,
                                             std::span<const double> initial,
                                             const MixtureOptions& options) {
  check_problem(outputs, y, offset, penalties);
  const std::size_t j = outputs.cols();
  std::vector<double> x(j, 0.0);
  if (!initial.empty()) {
    if (initial.size() != j) {
      throw ShapeError(fmt::format("mixture weights: {} columns but {} initial weights", j, initial.size()));
    }
    x.assign(initial.begin(), initial.end());
  }
  if (j == 0) return x;

  const SmoothPart smooth(outputs, y, offset, loss);
  const double lipschitz = smooth.lipschitz();
  if (!(lipschitz > 0.0)) {
    // Every column is zero: only the penalty depends on w.
    for (std::size_t a = 0; a < j; ++a)
      if (penalties[a] > 0.0) x[a] = 0.0;
    return x;
  }
  const double step = 1.0 / lipschitz;
  auto total = [&](std::span<const double> w) { return smooth.value(w) + penalty_term(penalties, w); };

  double fx = total(x);
  std::vector<double> yv = x;
  std::vector<double> z(j), x_old(j);
  double t = 1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const auto g = smooth.gradient(yv);
    for (std::size_t a = 0; a < j; ++a)
      z[a] = soft_threshold(yv[a] - step * g[a], step * penalties[a]);
    const double fz = total(z);
    x_old = x;
    const bool accepted = fz <= fx;
    if (accepted) {
      x = z;
      fx = fz;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t a = 0; a < j; ++a)
      yv[a] = x[a] + (t / t_next) * (z[a] - x[a]) + ((t - 1.0) / t_next) * (x[a] - x_old[a]);
    t = t_next;

    if (accepted) {
      double change = 0.0, norm = 0.0;
      for (std::size_t a = 0; a < j; ++a) {
        change += (x[a] - x_old[a]) * (x[a] - x_old[a]);
        norm += x_old[a] * x_old[a];
      }
      if (std::sqrt(change) <= options.rel_tol * std::max(std::sqrt(norm), 1e-12)) break;
    }
  }
  return x;
}

}  // namespace axnn
