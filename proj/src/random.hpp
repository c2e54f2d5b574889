#pragma once

#include <cstdint>
#include <random>

namespace btsp::detail {

// Uniform draw from [0, bound] by rejection; mt19937_64 output is fixed by the
// standard, so sequences are identical across standard libraries.
inline std::uint64_t draw_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == UINT64_MAX) return rng();
  const std::uint64_t span = bound + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % span;
}

}  // namespace btsp::detail
