#pragma once

#include <array>
#include <cstdint>

namespace ampeq {

/// Philox 4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so any (seed, stream, mode, step) tuple can be regenerated
/// independently and in any order.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);
};

/// One standard normal, keyed by (seed, stream, mode, step). Box-Muller over
/// the four 32-bit lanes of a single Philox block.
double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                 std::uint64_t step);

/// One uniform in [0,1), same keying, independent of normal_at draws.
double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                  std::uint64_t step);

}  // namespace ampeq
