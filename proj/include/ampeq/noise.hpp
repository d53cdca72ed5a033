#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ampeq {

/// Grid of Brownian increments: increments[step * n_modes + mode] is
/// delta beta_{mode}(t_step) ~ N(0, dt). Immutable after creation;
/// regeneration from the same (seed, stream) is bit-identical.
struct NoisePath {
  double dt = 0.0;
  std::int64_t n_steps = 0;
  int n_modes = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> increments;

  double at(std::int64_t step, int mode) const {
    return increments[static_cast<std::size_t>(step) * n_modes + mode];
  }
};

/// Gaussian increments with variance dt, one column per noise mode.
/// stream separates Monte Carlo samples under a common seed.
NoisePath sample_path(double dt, std::int64_t n_steps, int n_modes,
                      std::uint64_t seed, std::uint64_t stream = 0);

/// Pathwise rescaling to the slow time scale: increments scale by epsilon and
/// the step becomes epsilon^2 * dt, so the rescaled path carries the identical
/// randomness consumed by the fast-grid solver.
NoisePath rescale_to_slow(const NoisePath& path, double epsilon);

/// Binary replay format: header dt (f64), n_steps (u64), n_modes (u64),
/// seed (u64), then row-major f64 increments; all little-endian.
void save_path(const NoisePath& path, const std::string& filename);
NoisePath load_path(const std::string& filename);

}  // namespace ampeq
