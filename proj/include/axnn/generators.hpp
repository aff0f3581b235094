#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axnn/dataset.hpp"

namespace axnn {

/// Synthetic benchmark functions.
///   Simple:   y = x1 + x2^2 + x3^3 + exp(x4) + x1 x2 + x3 x4, x ~ U[-1, 1)^4
///   Example1: pi^(x1 x2) sqrt(2 x3) - asin(x4) + log(x3 + x5)
///             - (x9 / x10) sqrt(x7 / x8) - x2 x7,
///             x4, x5, x8, x10 ~ U[0.6, 1), the rest ~ U[0, 1)
///   Example2: x1^2 + x2^2 + x3^2 + x3 x4 + 2 x4 x5 x6 + x4^3 x7 + x5 x6 x7
///             + x7 x8 x9 x10
///   Example3: x1 x2 + 2^(x3+x5+x6) + 2^(x3+x4+x5+x7) + sin(x7 sin(x8+x9))
///             + acos(0.9 x10)
///   Example4: 1 / (1 + x1^2 + x2^2 + x3^2) + sqrt(exp(x4 + x5)) + |x6 + x7|
///             + x8 x9 x10
/// Examples 2-4 draw all ten covariates from U[-1, 1).
enum class Benchmark { Simple, Example1, Example2, Example3, Example4 };

Benchmark benchmark_from_string(const std::string& name);
std::string to_string(Benchmark b);
std::size_t benchmark_features(Benchmark b);

/// Covariate support [lo, hi) for covariate `c` (0-based).
std::pair<double, double> benchmark_support(Benchmark b, std::size_t c);

/// Noiseless function value at one point, evaluated directly from the formula.
double benchmark_value(Benchmark b, std::span<const double> x);

/// Named additive terms at one point; they sum to benchmark_value.
std::vector<std::pair<std::string, double>> benchmark_terms(Benchmark b, std::span<const double> x);

/// Covariates and noise come from independent child streams of `seed`, so
/// changing noise_sd never changes x.
Dataset generate(Benchmark b, std::size_t n, std::uint64_t seed, double noise_sd);

Dataset gen_simple(std::size_t n, std::uint64_t seed, double noise_sd = 0.1);
/// which in {1, 2, 3, 4}; anything else raises InvalidArgumentError.
Dataset gen_example(int which, std::size_t n, std::uint64_t seed, double noise_sd = 0.0);

}  // namespace axnn
