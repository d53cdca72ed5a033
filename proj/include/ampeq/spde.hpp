#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ampeq/amplitude.hpp"
#include "ampeq/model.hpp"
#include "ampeq/noise.hpp"

namespace ampeq {

/// Strided snapshots of a fast-grid solve. On blow-up the stored states end
/// at the last finite snapshot and blowup_step records the offending step.
struct SpdeTrajectory {
  std::vector<double> times;        // fast times of the stored states
  std::vector<std::int64_t> steps;  // step indices of the stored states
  std::vector<Field> states;
  double epsilon = 0.0;
  double dt = 0.0;
  bool blowup_flag = false;
  std::int64_t blowup_step = -1;
};

/// Drift-implicit Euler spectral Galerkin step, per mode k:
///   u_{n+1,k} = (1 + dt lambda_k)^{-1} [u_{n,k} + dt (eps^2 L u_n + F(u_n))_k
///               + eps sum_j (G(u_n) f_j)_k dbeta_{j,n}].
/// The stiff diagonal part is implicit; perturbation, nonlinearity and noise
/// are explicit. States beyond blowup_l2 in L2 flag a truncation, not an error.
SpdeTrajectory solve_spde(const ModelSpec& model, const Field& u0,
                          const NoisePath& path, double epsilon,
                          std::int64_t snapshot_stride,
                          double blowup_l2 = 1e6);

/// First stored slow time at which |a1|, |a2| or ||P_s u / eps||_alpha leaves
/// the eps^{-kappa} envelope; nullopt when the envelope holds throughout.
/// kappa must lie in (0, 1/20).
std::optional<double> stopping_monitor(const SpdeTrajectory& traj,
                                       const AmplitudePath& amp, double kappa,
                                       const SpectralBasis& basis,
                                       double alpha = 1.0);

/// Columns: t, then one column per stored mode coefficient.
void export_trajectory_csv(const SpdeTrajectory& traj, std::ostream& os);

}  // namespace ampeq
