#include "axnn/generators.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

Benchmark benchmark_from_string(const std::string& name) {
  if (name == "simple") return Benchmark::Simple;
  if (name == "ex1") return Benchmark::Example1;
  if (name == "ex2") return Benchmark::Example2;
  if (name == "ex3") return Benchmark::Example3;
  if (name == "ex4") return Benchmark::Example4;
  throw InvalidArgumentError(
      fmt::format("unknown example '{}' (expected simple|ex1|ex2|ex3|ex4)", name));
}

std::string to_string(Benchmark b) {
  switch (b) {
    case Benchmark::Simple: return "simple";
    case Benchmark::Example1: return "ex1";
    case Benchmark::Example2: return "ex2";
    case Benchmark::Example3: return "ex3";
    case Benchmark::Example4: return "ex4";
  }
  return "?";
}

std::size_t benchmark_features(Benchmark b) { return b == Benchmark::Simple ? 4 : 10; }

std::pair<double, double> benchmark_support(Benchmark b, std::size_t c) {
  if (b == Benchmark::Example1) {
    // x4, x5, x8, x10 (0-based 3, 4, 7, 9) stay away from the sqrt/log/asin/
    // division singularities.
    if (c == 3 || c == 4 || c == 7 || c == 9) return {0.6, 1.0};
    return {0.0, 1.0};
  }
  return {-1.0, 1.0};
}

std::vector<std::pair<std::string, double>> benchmark_terms(Benchmark b, std::span<const double> x) {
  using std::numbers::pi;
  switch (b) {
    case Benchmark::Simple:
      return {{"x1", x[0]},
              {"x2^2", x[1] * x[1]},
              {"x3^3", x[2] * x[2] * x[2]},
              {"exp(x4)", std::exp(x[3])},
              {"x1*x2", x[0] * x[1]},
              {"x3*x4", x[2] * x[3]}};
    case Benchmark::Example1:
      return {{"pi^(x1*x2)*sqrt(2*x3)", std::pow(pi, x[0] * x[1]) * std::sqrt(2.0 * x[2])},
              {"-asin(x4)", -std::asin(x[3])},
              {"log(x3+x5)", std::log(x[2] + x[4])},
              {"-(x9/x10)*sqrt(x7/x8)", -(x[8] / x[9]) * std::sqrt(x[6] / x[7])},
              {"-x2*x7", -x[1] * x[6]}};
    case Benchmark::Example2:
      return {{"x1^2", x[0] * x[0]},
              {"x2^2", x[1] * x[1]},
              {"x3^2", x[2] * x[2]},
              {"x3*x4", x[2] * x[3]},
              {"2*x4*x5*x6", 2.0 * x[3] * x[4] * x[5]},
              {"x4^3*x7", x[3] * x[3] * x[3] * x[6]},
              {"x5*x6*x7", x[4] * x[5] * x[6]},
              {"x7*x8*x9*x10", x[6] * x[7] * x[8] * x[9]}};
    case Benchmark::Example3:
      return {{"x1*x2", x[0] * x[1]},
              {"2^(x3+x5+x6)", std::pow(2.0, x[2] + x[4] + x[5])},
              {"2^(x3+x4+x5+x7)", std::pow(2.0, x[2] + x[3] + x[4] + x[6])},
              {"sin(x7*sin(x8+x9))", std::sin(x[6] * std::sin(x[7] + x[8]))},
              {"acos(0.9*x10)", std::acos(0.9 * x[9])}};
    case Benchmark::Example4:
      return {{"1/(1+x1^2+x2^2+x3^2)", 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2])},
              {"sqrt(exp(x4+x5))", std::sqrt(std::exp(x[3] + x[4]))},
              {"|x6+x7|", std::abs(x[5] + x[6])},
              {"x8*x9*x10", x[7] * x[8] * x[9]}};
  }
  return {};
}

double benchmark_value(Benchmark b, std::span<const double> x) {
  if (x.size() != benchmark_features(b)) {
    throw ShapeError(fmt::format("{} takes {} covariates, got {}", to_string(b),
                                 benchmark_features(b), x.size()));
  }
  using std::numbers::pi;
  switch (b) {
    case Benchmark::Simple:
      return x[0] + std::pow(x[1], 2) + std::pow(x[2], 3) + std::exp(x[3]) + x[0] * x[1] +
             x[2] * x[3];
    case Benchmark::Example1:
      return std::pow(pi, x[0] * x[1]) * std::sqrt(2.0 * x[2]) - std::asin(x[3]) +
             std::log(x[2] + x[4]) - (x[8] / x[9]) * std::sqrt(x[6] / x[7]) - x[1] * x[6];
    case Benchmark::Example2:
      return std::pow(x[0], 2) + std::pow(x[1], 2) + std::pow(x[2], 2) + x[2] * x[3] +
             2.0 * x[3] * x[4] * x[5] + std::pow(x[3], 3) * x[6] + x[4] * x[5] * x[6] +
             x[6] * x[7] * x[8] * x[9];
    case Benchmark::Example3:
      return x[0] * x[1] + std::pow(2.0, x[2] + x[4] + x[5]) +
             std::pow(2.0, x[2] + x[3] + x[4] + x[6]) + std::sin(x[6] * std::sin(x[7] + x[8])) +
             std::acos(0.9 * x[9]);
    case Benchmark::Example4:
      return 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) + std::exp(0.5 * (x[3] + x[4])) +
             std::abs(x[5] + x[6]) + x[7] * x[8] * x[9];
  }
  return 0.0;
}

Dataset generate(Benchmark b, std::size_t n, std::uint64_t seed, double noise_sd) {
  if (!(noise_sd >= 0.0)) {
    throw InvalidArgumentError(fmt::format("noise sd must be >= 0, got {}", noise_sd));
  }
  const std::size_t p = benchmark_features(b);
  const Rng root(seed);
  Rng x_stream = root.child("covariates", static_cast<std::uint64_t>(b));
  Rng noise_stream = root.child("noise", static_cast<std::uint64_t>(b));

  Dataset data;
  data.x = Matrix(n, p);
  data.y.resize(n);
  data.feature_names = default_feature_names(p);
  data.task = Task::Regression;

  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.x.row(i);
    for (std::size_t c = 0; c < p; ++c) {
      const auto [lo, hi] = benchmark_support(b, c);
      row[c] = x_stream.uniform(lo, hi);
    }
    const auto terms = benchmark_terms(b, row);
    if (i == 0) {
      for (const auto& [name, value] : terms) data.components.push_back({name, {}});
      for (auto& comp : data.components) comp.values.resize(n);
    }
    double f = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      data.components[t].values[i] = terms[t].second;
      f += terms[t].second;
    }
    const double noise = noise_sd > 0.0 ? noise_sd * noise_stream.normal() : 0.0;
    data.y[i] = f + noise;
  }
  return data;
}

Dataset gen_simple(std::size_t n, std::uint64_t seed, double noise_sd) {
  return generate(Benchmark::Simple, n, seed, noise_sd);
}

Dataset gen_example(int which, std::size_t n, std::uint64_t seed, double noise_sd) {
  switch (which) {
    case 1: return generate(Benchmark::Example1, n, seed, noise_sd);
    case 2: return generate(Benchmark::Example2, n, seed, noise_sd);
    case 3: return generate(Benchmark::Example3, n, seed, noise_sd);
    case 4: return generate(Benchmark::Example4, n, seed, noise_sd);
    default: break;
  }
  throw InvalidArgumentError(fmt::format("example id must be 1, 2, 3 or 4 (got {})", which));
}

}  // namespace axnn
