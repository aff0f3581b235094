#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "axnn/rng.hpp"

namespace axnn::testing {

/// A property returns nullopt when it holds and a description otherwise.
using Property = std::function<std::optional<std::string>(Rng& rng, std::size_t index)>;

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return cases > 0 && failures == 0; }
};

inline constexpr std::size_t kDefaultCases = 200;

/// Runs `cases` independent cases; case i draws from Rng(seed).child("case", i)
/// so a failure can be replayed on its own. Exceptions count as failures.
PropertyResult check_property(const std::string& name, const Property& property,
                              std::size_t cases = kDefaultCases, std::uint64_t seed = 20240611);

}  // namespace axnn::testing
