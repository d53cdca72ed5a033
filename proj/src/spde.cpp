#include "ampeq/spde.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ampeq {

SpdeTrajectory solve_spde(const ModelSpec& model, const Field& u0,
                          const NoisePath& path, double epsilon,
                          std::int64_t snapshot_stride, double blowup_l2) {
  if (static_cast<int>(u0.size()) != model.basis.n_modes) {
    throw std::invalid_argument("solve_spde: u0/basis length mismatch");
  }
  if (!u0.all_finite()) throw std::domain_error("solve_spde: non-finite u0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::domain_error("solve_spde: epsilon must lie in [0,1)");
  }
  if (snapshot_stride < 1) {
    throw std::invalid_argument("solve_spde: snapshot_stride must be >= 1");
  }
  if (path.n_modes != model.noise_modes) {
    throw std::invalid_argument("solve_spde: path/model noise mode mismatch");
  }

  const int n_modes = model.basis.n_modes;
  const double dt = path.dt;
  const std::int64_t n_steps = path.n_steps;
  const double eps2 = epsilon * epsilon;
  const double guard2 = blowup_l2 * blowup_l2;

  std::vector<double> inv_diag(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    inv_diag[k] = 1.0 / (1.0 + dt * model.basis.eigenvalues[k]);
  }

  SpdeTrajectory traj;
  traj.epsilon = epsilon;
  traj.dt = dt;
  traj.times.reserve(static_cast<std::size_t>(n_steps / snapshot_stride) + 2);

  Field u = u0;
  Field f_val(n_modes);
  std::vector<Field> g_val(path.n_modes, Field(n_modes));
  RhsWorkspace ws;

  auto snapshot = [&](std::int64_t step) {
    traj.times.push_back(step * dt);
    traj.steps.push_back(step);
    traj.states.push_back(u);
  };
  snapshot(0);

  for (std::int64_t n = 0; n < n_steps; ++n) {
    if (model.fused_rhs) {
      model.fused_rhs(u, ws, f_val, g_val);
    } else {
      f_val = model.trilinear_F(u, u, u);
      for (int j = 0; j < path.n_modes; ++j) g_val[j] = model.diffusion_G(u, j);
    }
    if (eps2 > 0.0) {
      const Field lu = model.linear_L(u);
      for (int k = 0; k < n_modes; ++k) {
        u[k] += dt * (eps2 * lu[k] + f_val[k]);
      }
    } else {
      for (int k = 0; k < n_modes; ++k) u[k] += dt * f_val[k];
    }
    for (int j = 0; j < path.n_modes; ++j) {
      const double dw = epsilon * path.at(n, j);
      if (dw == 0.0) continue;
      for (int k = 0; k < n_modes; ++k) u[k] += g_val[j][k] * dw;
    }
    double norm2 = 0.0;
    for (int k = 0; k < n_modes; ++k) {
      u[k] *= inv_diag[k];
      norm2 += u[k] * u[k];
    }
    if (!std::isfinite(norm2) || norm2 > guard2) {
      traj.blowup_flag = true;
      traj.blowup_step = n + 1;
      return traj;
    }
    if ((n + 1) % snapshot_stride == 0 || n + 1 == n_steps) snapshot(n + 1);
  }
  return traj;
}

std::optional<double> stopping_monitor(const SpdeTrajectory& traj,
                                       const AmplitudePath& amp, double kappa,
                                       const SpectralBasis& basis,
                                       double alpha) {
  if (!(kappa > 0.0 && kappa < 0.05)) {
    throw std::domain_error("stopping_monitor: kappa must lie in (0, 1/20)");
  }
  const double eps = traj.epsilon;
  const double threshold = std::pow(eps, -kappa);
  const double eps2 = eps * eps;

  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const std::int64_t step = traj.steps[i];
    const double slow_time = eps2 * traj.times[i];
    if (amp.truncated && amp.truncated_at >= 0 && step >= amp.truncated_at) {
      return slow_time;
    }
    double a1 = 0.0, a2 = 0.0;
    if (step < static_cast<std::int64_t>(amp.a1.size())) a1 = amp.a1[step];
    if (!amp.a2.empty() && step < static_cast<std::int64_t>(amp.a2.size())) {
      a2 = amp.a2[step];
    }
    if (std::abs(a1) > threshold || std::abs(a2) > threshold) return slow_time;
    if (eps > 0.0) {
      Field psi = project_s(traj.states[i], basis);
      for (double& c : psi.coeffs) c /= eps;
      if (h_alpha_norm(psi, basis, alpha) > threshold) return slow_time;
    }
  }
  return std::nullopt;
}

void export_trajectory_csv(const SpdeTrajectory& traj, std::ostream& os) {
  const int n_modes = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  os << "t";
  for (int k = 1; k <= n_modes; ++k) os << ",c" << k;
  os << "\n";
  char buf[32];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
    os << buf;
    for (int k = 0; k < n_modes; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states[i][k]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace ampeq
