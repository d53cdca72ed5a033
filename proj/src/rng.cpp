#include "ampeq/rng.hpp"

#include <cmath>
#include <numbers>

namespace ampeq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kWeyl0;
  key[1] += kWeyl1;
}

// 53-bit mantissa from two lanes; in (0,1] when open_zero, else [0,1).
inline double to_unit(std::uint32_t a, std::uint32_t b, bool open_zero) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
  const double scale = 0x1.0p-53;
  return open_zero ? (static_cast<double>(bits) + 1.0) * scale
                   : static_cast<double>(bits) * scale;
}

inline std::array<std::uint32_t, 4> keyed_block(std::uint64_t seed,
                                                std::uint64_t stream,
                                                std::uint32_t mode,
                                                std::uint64_t step,
                                                std::uint32_t domain) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>(step >> 32),
      mode ^ (domain << 24),
      static_cast<std::uint32_t>(stream),
  };
  std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed) ^ static_cast<std::uint32_t>(stream >> 32),
      static_cast<std::uint32_t>(seed >> 32),
  };
  return Philox4x32::block(ctr, key);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) round_once(ctr, key);
  return ctr;
}

double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                 std::uint64_t step) {
  const auto r = keyed_block(seed, stream, mode, step, 0u);
  const double u1 = to_unit(r[0], r[1], true);
  const double u2 = to_unit(r[2], r[3], false);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                  std::uint64_t step) {
  const auto r = keyed_block(seed, stream, mode, step, 1u);
  return to_unit(r[0], r[1], false);
}

}  // namespace ampeq
