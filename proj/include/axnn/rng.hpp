#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace axnn {

/// xoshiro256** stream seeded through splitmix64.
///
/// Every Rng remembers the key it was created from. child() derives a new
/// key from that key and a label, so a child stream depends only on
/// (parent key, label) and never on how many values the parent has drawn.
/// Candidate fits use child streams keyed by (iteration, candidate), which
/// is what makes serial and parallel training produce the same models.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t key() const noexcept { return key_; }

  Rng child(std::string_view label) const;
  Rng child(std::uint64_t label) const;
  Rng child(std::string_view label, std::uint64_t a, std::uint64_t b = 0) const;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Standard normal via Box-Muller (no cached spare, so draws are stateless
  /// beyond the underlying stream).
  double normal() noexcept;
  /// Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  void shuffle(std::span<std::size_t> items) noexcept;

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

}  // namespace axnn
