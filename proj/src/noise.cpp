#include "ampeq/noise.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "ampeq/rng.hpp"

namespace ampeq {

static_assert(std::endian::native == std::endian::little,
              "replay files assume a little-endian host");

NoisePath sample_path(double dt, std::int64_t n_steps, int n_modes,
                      std::uint64_t seed, std::uint64_t stream) {
  if (!(dt > 0.0)) throw std::domain_error("sample_path: dt must be positive");
  if (n_steps < 1) throw std::domain_error("sample_path: n_steps must be >= 1");
  if (n_modes < 1) throw std::domain_error("sample_path: n_modes must be >= 1");
  NoisePath p;
  p.dt = dt;
  p.n_steps = n_steps;
  p.n_modes = n_modes;
  p.seed = seed;
  p.stream = stream;
  p.increments.resize(static_cast<std::size_t>(n_steps) * n_modes);
  const double scale = std::sqrt(dt);
  for (std::int64_t n = 0; n < n_steps; ++n) {
    for (int j = 0; j < n_modes; ++j) {
      p.increments[static_cast<std::size_t>(n) * n_modes + j] =
          scale * normal_at(seed, stream, static_cast<std::uint32_t>(j),
                            static_cast<std::uint64_t>(n));
    }
  }
  return p;
}

NoisePath rescale_to_slow(const NoisePath& path, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::domain_error("rescale_to_slow: epsilon must be positive");
  }
  NoisePath slow = path;
  slow.dt = epsilon * epsilon * path.dt;
  for (double& v : slow.increments) v *= epsilon;
  return slow;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

void save_path(const NoisePath& path, const std::string& filename) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(filename.c_str(), "wb"));
  if (!f) throw std::runtime_error("save_path: cannot open " + filename);
  const std::uint64_t n_steps = static_cast<std::uint64_t>(path.n_steps);
  const std::uint64_t n_modes = static_cast<std::uint64_t>(path.n_modes);
  bool ok = std::fwrite(&path.dt, sizeof(double), 1, f.get()) == 1 &&
            std::fwrite(&n_steps, sizeof(std::uint64_t), 1, f.get()) == 1 &&
            std::fwrite(&n_modes, sizeof(std::uint64_t), 1, f.get()) == 1 &&
            std::fwrite(&path.seed, sizeof(std::uint64_t), 1, f.get()) == 1;
  ok = ok && std::fwrite(path.increments.data(), sizeof(double),
                         path.increments.size(),
                         f.get()) == path.increments.size();
  if (!ok) throw std::runtime_error("save_path: write failed for " + filename);
}

NoisePath load_path(const std::string& filename) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(filename.c_str(), "rb"));
  if (!f) throw std::runtime_error("load_path: cannot open " + filename);
  NoisePath p;
  std::uint64_t n_steps = 0, n_modes = 0;
  bool ok = std::fread(&p.dt, sizeof(double), 1, f.get()) == 1 &&
            std::fread(&n_steps, sizeof(std::uint64_t), 1, f.get()) == 1 &&
            std::fread(&n_modes, sizeof(std::uint64_t), 1, f.get()) == 1 &&
            std::fread(&p.seed, sizeof(std::uint64_t), 1, f.get()) == 1;
  if (!ok) throw std::runtime_error("load_path: truncated header in " + filename);
  p.n_steps = static_cast<std::int64_t>(n_steps);
  p.n_modes = static_cast<int>(n_modes);
  if (p.n_steps < 1 || p.n_modes < 1 || !(p.dt > 0.0)) {
    throw std::runtime_error("load_path: malformed header in " + filename);
  }
  p.increments.resize(n_steps * n_modes);
  if (std::fread(p.increments.data(), sizeof(double), p.increments.size(),
                 f.get()) != p.increments.size()) {
    throw std::runtime_error("load_path: truncated data in " + filename);
  }
  return p;
}

}  // namespace ampeq
