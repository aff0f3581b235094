#include "axnn/net.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "axnn/errors.hpp"
#include "axnn/init.hpp"

namespace axnn {

std::string to_string(LearnerKind kind) { return kind == LearnerKind::GAMnet ? "gamnet" : "xnn"; }

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "gamnet" || name == "GAMnet") return LearnerKind::GAMnet;
  if (name == "xnn" || name == "xNN") return LearnerKind::XNN;
  throw InvalidArgumentError(fmt::format("unknown learner kind '{}'", name));
}

std::string describe(const LearnerSpec& spec) {
  return fmt::format("{}(k={}, widths=[{}])", to_string(spec.kind), spec.num_ridges,
                     fmt::join(spec.subnet.hidden_widths, ","));
}

void validate(const LearnerSpec& spec, std::size_t num_inputs) {
  if (num_inputs == 0) throw InvalidArchitectureError("learner needs at least one covariate");
  if (spec.subnet.hidden_widths.empty()) {
    throw InvalidArchitectureError(
        fmt::format("{}: ridge subnetwork needs at least one hidden layer", describe(spec)));
  }
  for (std::size_t w : spec.subnet.hidden_widths) {
    if (w == 0) throw InvalidArchitectureError(fmt::format("{}: zero-width layer", describe(spec)));
  }
  if (spec.kind == LearnerKind::GAMnet) {
    if (spec.num_ridges != 0 && spec.num_ridges != num_inputs) {
      throw InvalidArchitectureError(fmt::format(
          "{}: a GAMnet has one ridge per covariate ({})", describe(spec), num_inputs));
    }
  } else if (spec.num_ridges == 0) {
    throw InvalidArchitectureError(fmt::format("{}: xNN needs at least one ridge", describe(spec)));
  }
}

std::size_t resolved_ridge_count(const LearnerSpec& spec, std::size_t num_inputs) {
  return spec.kind == LearnerKind::GAMnet ? num_inputs : spec.num_ridges;
}

std::size_t parameter_count(const LearnerSpec& spec, std::size_t num_inputs) {
  validate(spec, num_inputs);
  const std::size_t k = resolved_ridge_count(spec, num_inputs);
  std::size_t per_ridge = 0;
  std::size_t fan_in = 1;
  for (std::size_t w : spec.subnet.hidden_widths) {
    per_ridge += w * fan_in + w;
    fan_in = w;
  }
  per_ridge += fan_in;
  const std::size_t projection = spec.kind == LearnerKind::XNN ? k * num_inputs : 0;
  return projection + k * per_ridge + k + 1;
}

// ---------------------------------------------------------------------------
// LearnerParams

std::vector<std::span<double>> LearnerParams::blocks() {
  std::vector<std::span<double>> out;
  if (!projections.empty()) out.push_back(projections.values());
  for (auto& ridge : ridges) {
    for (auto& layer : ridge.hidden) {
      out.push_back(layer.weights.values());
      out.push_back(layer.bias);
    }
    out.push_back(ridge.output_weights);
  }
  out.push_back(combination_weights);
  out.push_back(std::span<double>(&combination_bias, 1));
  return out;
}

std::vector<std::span<const double>> LearnerParams::blocks() const {
  auto mutable_blocks = const_cast<LearnerParams*>(this)->blocks();
  return {mutable_blocks.begin(), mutable_blocks.end()};
}

std::size_t LearnerParams::size() const {
  std::size_t n = 0;
  for (auto b : blocks()) n += b.size();
  return n;
}

std::vector<double> LearnerParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (auto b : blocks()) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

void LearnerParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw ShapeError(fmt::format("cannot assign {} values to {} parameters", flat.size(), size()));
  }
  std::size_t offset = 0;
  for (auto b : blocks()) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), b.size(), b.begin());
    offset += b.size();
  }
}

LearnerParams LearnerParams::zeros_like() const {
  LearnerParams z = *this;
  for (auto b : z.blocks()) std::fill(b.begin(), b.end(), 0.0);
  return z;
}

bool LearnerParams::all_finite() const {
  for (auto b : blocks())
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------

void validate(const BaseLearner& learner) {
  const auto& spec = learner.spec;
  const std::size_t p = learner.num_inputs;
  validate(spec, p);
  const std::size_t k = resolved_ridge_count(spec, p);
  const auto& params = learner.params;
  auto fail = [&](const std::string& why) {
    throw ShapeError(fmt::format("{} on {} inputs: {}", describe(spec), p, why));
  };
  if (spec.num_ridges != k) fail("unresolved ridge count");
  if (params.ridges.size() != k) fail(fmt::format("{} ridge subnetworks", params.ridges.size()));
  if (params.combination_weights.size() != k) fail("combination weight count");
  if (spec.kind == LearnerKind::XNN) {
    if (params.projections.rows() != k || params.projections.cols() != p)
      fail(fmt::format("projection matrix is {}", shape_string(params.projections)));
  } else if (!params.projections.empty()) {
    fail("GAMnet learners have no projection layer");
  }
  for (const auto& ridge : params.ridges) {
    if (ridge.hidden.size() != spec.subnet.depth()) fail("ridge depth");
    std::size_t fan_in = 1;
    for (std::size_t l = 0; l < ridge.hidden.size(); ++l) {
      const std::size_t w = spec.subnet.hidden_widths[l];
      const auto& layer = ridge.hidden[l];
      if (layer.weights.rows() != w || layer.weights.cols() != fan_in || layer.bias.size() != w)
        fail(fmt::format("layer {} has weights {} and {} biases", l + 1,
                         shape_string(layer.weights), layer.bias.size()));
      fan_in = w;
    }
    if (ridge.output_weights.size() != fan_in) fail("output unit width");
  }
}

BaseLearner new_learner(const LearnerSpec& spec, std::size_t num_inputs, Rng& rng) {
  validate(spec, num_inputs);
  BaseLearner learner;
  learner.spec = spec;
  learner.spec.num_ridges = resolved_ridge_count(spec, num_inputs);
  learner.num_inputs = num_inputs;
  const std::size_t k = learner.spec.num_ridges;

  auto& params = learner.params;
  if (spec.kind == LearnerKind::XNN) params.projections = glorot_uniform(num_inputs, k, rng);
  params.ridges.resize(k);
  for (auto& ridge : params.ridges) {
    std::size_t fan_in = 1;
    for (std::size_t w : spec.subnet.hidden_widths) {
      auto layer = init_layer(fan_in, w, rng);
      ridge.hidden.push_back({std::move(layer.weights), std::move(layer.bias)});
      fan_in = w;
    }
    const Matrix out = glorot_uniform(fan_in, 1, rng);
    ridge.output_weights.assign(out.values().begin(), out.values().end());
  }
  params.combination_weights.assign(k, kCombinationInit);
  params.combination_bias = 0.0;
  learner.mixture_weight = 0.0;
  return learner;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

void check_inputs(const BaseLearner& learner, const Matrix& x) {
  if (x.cols() != learner.num_inputs) {
    throw ShapeError(fmt::format("learner expects {} covariates but input is {}",
                                 learner.num_inputs, shape_string(x)));
  }
}

Matrix ridge_inputs(const BaseLearner& learner, const Matrix& x) {
  if (learner.spec.kind == LearnerKind::XNN) return gemm(x, learner.params.projections, false, true);
  return x;
}

// relu(in * W^T + b), `in` is N x fan_in given as a strided column source.
Matrix dense_relu(const Matrix& in, const DenseLayer& layer) {
  const std::size_t n = in.rows();
  const std::size_t fan_in = in.cols();
  const std::size_t width = layer.weights.rows();
  Matrix out(n, width);
  const double* w = layer.weights.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = in.values().data() + i * fan_in;
    double* dst = out.values().data() + i * width;
    for (std::size_t u = 0; u < width; ++u) {
      const double* wu = w + u * fan_in;
      double acc = layer.bias[u];
      for (std::size_t j = 0; j < fan_in; ++j) acc += row[j] * wu[j];
      dst[u] = acc > 0.0 ? acc : 0.0;
    }
  }
  return out;
}

Matrix first_layer_relu(std::span<const double> z, const DenseLayer& layer) {
  const std::size_t width = layer.weights.rows();
  Matrix out(z.size(), width);
  const double* w = layer.weights.values().data();
  for (std::size_t i = 0; i < z.size(); ++i) {
    double* dst = out.values().data() + i * width;
    for (std::size_t u = 0; u < width; ++u) {
      const double acc = layer.bias[u] + z[i] * w[u];
      dst[u] = acc > 0.0 ? acc : 0.0;
    }
  }
  return out;
}

}  // namespace

ForwardPass forward_pass(const BaseLearner& learner, const Matrix& x) {
  check_inputs(learner, x);
  const std::size_t n = x.rows();
  const std::size_t k = learner.num_ridges();
  const auto& params = learner.params;

  ForwardPass pass;
  pass.ridge_inputs = ridge_inputs(learner, x);
  pass.activations.resize(k);
  pass.ridge_outputs = Matrix(n, k);
  pass.output.assign(n, 0.0);

  for (std::size_t r = 0; r < k; ++r) {
    const auto& ridge = params.ridges[r];
    const std::vector<double> z = pass.ridge_inputs.column(r);
    auto& acts = pass.activations[r];
    acts.reserve(ridge.hidden.size());
    acts.push_back(first_layer_relu(z, ridge.hidden[0]));
    for (std::size_t l = 1; l < ridge.hidden.size(); ++l)
      acts.push_back(dense_relu(acts.back(), ridge.hidden[l]));
    const Matrix& last = acts.back();
    const std::size_t width = last.cols();
    for (std::size_t i = 0; i < n; ++i) {
      const double* h = last.values().data() + i * width;
      double o = 0.0;
      for (std::size_t u = 0; u < width; ++u) o += h[u] * ridge.output_weights[u];
      pass.ridge_outputs(i, r) = o;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r)
      sum += params.combination_weights[r] * pass.ridge_outputs(i, r);
    pass.output[i] = sum + params.combination_bias;
  }
  return pass;
}

Matrix forward_ridges(const BaseLearner& learner, const Matrix& x) {
  const ForwardPass pass = forward_pass(learner, x);
  Matrix cols = pass.ridge_outputs;
  for (std::size_t i = 0; i < cols.rows(); ++i)
    for (std::size_t r = 0; r < cols.cols(); ++r)
      cols(i, r) *= learner.params.combination_weights[r];
  return cols;
}

std::vector<double> forward(const BaseLearner& learner, const Matrix& x) {
  return forward_pass(learner, x).output;
}

// ---------------------------------------------------------------------------
// Backward

LearnerGradients backward(const BaseLearner& learner, const Matrix& x,
                          std::span<const double> upstream, bool input_gradient) {
  const ForwardPass pass = forward_pass(learner, x);
  return backward(learner, x, pass, upstream, input_gradient);
}

LearnerGradients backward(const BaseLearner& learner, const Matrix& x, const ForwardPass& pass,
                          std::span<const double> upstream, bool input_gradient) {
  check_inputs(learner, x);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t k = learner.num_ridges();
  if (upstream.size() != n) {
    throw ShapeError(fmt::format("upstream gradient has length {} for {} samples",
                                 upstream.size(), n));
  }
  const auto& params = learner.params;
  const bool is_xnn = learner.spec.kind == LearnerKind::XNN;

  LearnerGradients grads{params.zeros_like(), input_gradient ? Matrix(n, p) : Matrix()};
  auto& g = grads.params;

  double bias_grad = 0.0;
  for (double u : upstream) bias_grad += u;
  g.combination_bias = bias_grad;

  std::vector<double> d_out(n);
  std::vector<double> d_input(n);
  for (std::size_t r = 0; r < k; ++r) {
    const auto& ridge = params.ridges[r];
    auto& gr = g.ridges[r];
    const auto& acts = pass.activations[r];
    const double c = params.combination_weights[r];

    double dc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dc += upstream[i] * pass.ridge_outputs(i, r);
      d_out[i] = upstream[i] * c;
    }
    g.combination_weights[r] = dc;

    // Output unit.
    const Matrix& last = acts.back();
    std::size_t width = last.cols();
    Matrix delta(n, width);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t u = 0; u < width; ++u) {
        const double h = last(i, u);
        gr.output_weights[u] += d_out[i] * h;
        delta(i, u) = h > 0.0 ? d_out[i] * ridge.output_weights[u] : 0.0;
      }
    }

    // Hidden layers, last to first. `delta` holds dLoss/dpre-activation.
    for (std::size_t l = ridge.hidden.size(); l-- > 0;) {
      const auto& layer = ridge.hidden[l];
      auto& gl = gr.hidden[l];
      width = layer.weights.rows();
      const std::size_t fan_in = layer.weights.cols();
      if (l == 0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double z = pass.ridge_inputs(i, r);
          double dz = 0.0;
          for (std::size_t u = 0; u < width; ++u) {
            const double d = delta(i, u);
            gl.weights(u, 0) += d * z;
            gl.bias[u] += d;
            dz += d * layer.weights(u, 0);
          }
          d_input[i] = dz;
        }
      } else {
        const Matrix& below = acts[l - 1];
        Matrix next(n, fan_in);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t u = 0; u < width; ++u) {
            const double d = delta(i, u);
            if (d == 0.0) continue;
            gl.bias[u] += d;
            for (std::size_t j = 0; j < fan_in; ++j) {
              gl.weights(u, j) += d * below(i, j);
              next(i, j) += d * layer.weights(u, j);
            }
          }
          for (std::size_t j = 0; j < fan_in; ++j)
            if (!(below(i, j) > 0.0)) next(i, j) = 0.0;
        }
        delta = std::move(next);
      }
    }

    // Projection layer or direct covariate.
    if (is_xnn) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dz = d_input[i];
        if (dz == 0.0) continue;
        auto xi = x.row(i);
        for (std::size_t c2 = 0; c2 < p; ++c2) g.projections(r, c2) += dz * xi[c2];
        if (input_gradient)
          for (std::size_t c2 = 0; c2 < p; ++c2) grads.inputs(i, c2) += dz * params.projections(r, c2);
      }
    } else if (input_gradient) {
      for (std::size_t i = 0; i < n; ++i) grads.inputs(i, r) += d_input[i];
    }
  }
  return grads;
}

}  // namespace axnn
