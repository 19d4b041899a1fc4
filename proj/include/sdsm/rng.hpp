// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace sdsm {

using Rng = std::mt19937_64;

/// Independent generator for (master seed, stream index, purpose tag). Work
/// items draw only from their own substream, which keeps parallel results
/// independent of scheduling.
inline Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint32_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    tag};
  return Rng(seq);
}

}  // namespace sdsm
