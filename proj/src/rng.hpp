#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace secf::detail {

/// Unbiased draw from {0, ..., bound - 1}. Written out rather than using
/// std::uniform_int_distribution so subsets do not depend on the standard
/// library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace secf::detail
