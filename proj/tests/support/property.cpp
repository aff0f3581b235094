#include "property.hpp"

#include <exception>

#include <fmt/format.h>

namespace axnn::testing {

PropertyResult check_property(const std::string& name, const Property& property, std::size_t cases,
                              std::uint64_t seed) {
  PropertyResult result{name, cases, 0, {}};
  const Rng root(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    Rng rng = root.child("case", i);
    std::optional<std::string> failure;
    try {
      failure = property(rng, i);
    } catch (const std::exception& e) {
      failure = fmt::format("threw: {}", e.what());
    }
    if (failure) {
      if (result.failures == 0) result.first_failure = fmt::format("case {}: {}", i, *failure);
      ++result.failures;
    }
  }
  return result;
}

}  // namespace axnn::testing
