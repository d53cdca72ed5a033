#include "ampeq/model.hpp"

#include <cmath>
#include <stdexcept>

#include "ampeq/rng.hpp"

namespace ampeq {

namespace {

// Nemytskii nonlinearity of the diffusion: g(0) = 0, g'(0) = 1,
// g''(0) = -(h^2 - 1), g'''(0) = -1.
inline double g_of(double y, double h) {
  return std::sin(y) - std::cos(y) + std::cos(h * y);
}

struct AcKernel {
  Collocation grid;
  double h;
  std::vector<double> noise_grid;  // f_1 at the collocation points

  AcKernel(int n_modes, int n_quad, double h_, NoiseCase noise_case)
      : grid(n_modes, n_quad), h(h_) {
    const int m = grid.n_points();
    noise_grid.resize(m);
    if (noise_case == NoiseCase::SpatiallyUniform) {
      for (int i = 0; i < m; ++i) noise_grid[i] = 1.0;
    } else {
      const auto e1 = grid.mode_values(1);
      for (int i = 0; i < m; ++i) noise_grid[i] = e1[i];
    }
  }
};

void check_mode(int j, int noise_modes) {
  if (j < 0 || j >= noise_modes) {
    throw std::invalid_argument("noise mode index out of range");
  }
}

}  // namespace

Field unit_mode(const SpectralBasis& basis, int k) {
  if (k < 1 || k > basis.n_modes) {
    throw std::invalid_argument("unit_mode: index out of range");
  }
  Field f(basis.n_modes);
  f[k - 1] = 1.0;
  return f;
}

ModelSpec allen_cahn_model(const AllenCahnParams& params, int n_modes,
                           int n_quad, NoiseCase noise_case) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw std::invalid_argument("allen_cahn_model: epsilon must lie in (0,1)");
  }
  auto kernel = std::make_shared<const AcKernel>(n_modes, n_quad, params.h,
                                                 noise_case);
  ModelSpec model;
  model.basis = SpectralBasis::allen_cahn(n_modes);
  model.n_quad = n_quad;
  model.noise_modes = 1;
  model.family = ModelFamily::AllenCahn;
  model.noise_case = noise_case;
  model.h = params.h;
  model.grid = std::shared_ptr<const Collocation>(kernel, &kernel->grid);

  model.linear_L = [](const Field& u) { return u; };

  model.trilinear_F = [kernel](const Field& u, const Field& v, const Field& w) {
    const int m = kernel->grid.n_points();
    std::vector<double> gu(m), gtmp(m);
    kernel->grid.to_grid(u, gu);
    kernel->grid.to_grid(v, gtmp);
    for (int i = 0; i < m; ++i) gu[i] *= gtmp[i];
    kernel->grid.to_grid(w, gtmp);
    for (int i = 0; i < m; ++i) gu[i] = -gu[i] * gtmp[i];
    return kernel->grid.to_coeffs(gu);
  };

  model.diffusion_G = [kernel, nm = model.noise_modes](const Field& u, int j) {
    check_mode(j, nm);
    const int m = kernel->grid.n_points();
    std::vector<double> gu(m);
    kernel->grid.to_grid(u, gu);
    for (int i = 0; i < m; ++i) {
      gu[i] = g_of(gu[i], kernel->h) * kernel->noise_grid[i];
    }
    return kernel->grid.to_coeffs(gu);
  };

  model.g_prime0 = [kernel, nm = model.noise_modes](const Field& u, int j) {
    check_mode(j, nm);
    const int m = kernel->grid.n_points();
    std::vector<double> gu(m);
    kernel->grid.to_grid(u, gu);
    for (int i = 0; i < m; ++i) gu[i] *= kernel->noise_grid[i];
    return kernel->grid.to_coeffs(gu);
  };

  model.g_doubleprime0 = [kernel, nm = model.noise_modes](const Field& u1,
                                                          const Field& u2,
                                                          int j) {
    check_mode(j, nm);
    const int m = kernel->grid.n_points();
    const double factor = -(kernel->h * kernel->h - 1.0);
    std::vector<double> gu(m), gtmp(m);
    kernel->grid.to_grid(u1, gu);
    kernel->grid.to_grid(u2, gtmp);
    for (int i = 0; i < m; ++i) gu[i] *= factor * gtmp[i] * kernel->noise_grid[i];
    return kernel->grid.to_coeffs(gu);
  };

  model.fused_rhs = [kernel](const Field& u, RhsWorkspace& ws, Field& f_out,
                             std::vector<Field>& g_out) {
    const Collocation& grid = kernel->grid;
    const int m = grid.n_points();
    ws.grid_u.resize(m);
    ws.grid_tmp.resize(m);
    grid.to_grid(u, ws.grid_u);
    for (int i = 0; i < m; ++i) {
      const double y = ws.grid_u[i];
      ws.grid_tmp[i] = -y * y * y;
    }
    f_out = grid.to_coeffs(ws.grid_tmp);
    const double h = kernel->h;
    for (int i = 0; i < m; ++i) {
      const double y = ws.grid_u[i];
#if defined(__GNUC__) && !defined(__clang__)
      double s, c;
      ::sincos(y, &s, &c);
      ws.grid_tmp[i] = (s - c + std::cos(h * y)) * kernel->noise_grid[i];
#else
      ws.grid_tmp[i] =
          (std::sin(y) - std::cos(y) + std::cos(h * y)) * kernel->noise_grid[i];
#endif
    }
    g_out.resize(1);
    g_out[0] = grid.to_coeffs(ws.grid_tmp);
  };

  return model;
}

double projected_coefficient(const ModelSpec& model, Coefficient tag) {
  const Field e1 = unit_mode(model.basis, 1);
  auto kernel_part = [&](const Field& f) { return f[0]; };
  switch (tag) {
    case Coefficient::F111:
      return kernel_part(model.trilinear_F(e1, e1, e1));
    case Coefficient::FSecondDrift:
      return 3.0 * kernel_part(model.trilinear_F(e1, e1, e1));
    case Coefficient::GcE1E1:
      return kernel_part(model.g_prime0(e1, 0));
    case Coefficient::GccE1E1Proj:
      return kernel_part(model.g_doubleprime0(e1, e1, 0));
    case Coefficient::Case1SecondNoise:
      return 0.5 * kernel_part(model.g_doubleprime0(e1, e1, 0));
    case Coefficient::Sigma1FirstTerm: {
      double acc = 0.0;
      for (int j = 0; j < model.noise_modes; ++j) {
        const double v = kernel_part(model.g_prime0(e1, j));
        acc += v * v;
      }
      return acc;
    }
    case Coefficient::Sigma2Factor: {
      double acc = 0.0;
      for (int j = 0; j < model.noise_modes; ++j) {
        acc += kernel_part(model.g_prime0(e1, j)) *
               kernel_part(model.g_doubleprime0(e1, e1, j));
      }
      return acc;
    }
    case Coefficient::Sigma3Factor: {
      double acc = 0.0;
      for (int j = 0; j < model.noise_modes; ++j) {
        const double v = kernel_part(model.g_doubleprime0(e1, e1, j));
        acc += v * v;
      }
      return 0.25 * acc;
    }
  }
  throw std::invalid_argument("projected_coefficient: unknown tag");
}

std::vector<std::pair<std::string, Coefficient>> coefficient_catalog() {
  return {
      {"F111", Coefficient::F111},
      {"F_second_drift", Coefficient::FSecondDrift},
      {"Gc_e1_e1", Coefficient::GcE1E1},
      {"Gcc_e1e1_proj", Coefficient::GccE1E1Proj},
      {"case1_second_noise", Coefficient::Case1SecondNoise},
      {"sigma1_first_term", Coefficient::Sigma1FirstTerm},
      {"sigma2_factor", Coefficient::Sigma2Factor},
      {"sigma3_factor", Coefficient::Sigma3Factor},
  };
}

double projected_coefficient(const ModelSpec& model, const std::string& tag) {
  for (const auto& [name, value] : coefficient_catalog()) {
    if (name == tag) return projected_coefficient(model, value);
  }
  throw std::invalid_argument("projected_coefficient: unknown tag '" + tag + "'");
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

Field random_field(const SpectralBasis& basis, std::uint64_t seed,
                   std::uint64_t stream, std::uint64_t draw) {
  Field f(basis.n_modes);
  for (int k = 0; k < basis.n_modes; ++k) {
    const double u = uniform_at(seed, stream, static_cast<std::uint32_t>(k), draw);
    f[k] = (2.0 * u - 1.0) / (basis.eigenvalues[k] + 1.0);
  }
  return f;
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (double c : f.coeffs) acc += c * c;
  return std::sqrt(acc);
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ValidationReport validate_assumptions(const ModelSpec& model, int samples,
                                      std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("validate_assumptions: samples >= 1");
  ValidationReport report;
  const SpectralBasis& basis = model.basis;

  {
    // Trilinear symmetry under argument permutation.
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Field u = random_field(basis, seed, 1, 3 * s);
      const Field v = random_field(basis, seed, 1, 3 * s + 1);
      const Field w = random_field(basis, seed, 1, 3 * s + 2);
      const Field base = model.trilinear_F(u, v, w);
      const Field perms[5] = {
          model.trilinear_F(u, w, v), model.trilinear_F(v, u, w),
          model.trilinear_F(v, w, u), model.trilinear_F(w, u, v),
          model.trilinear_F(w, v, u)};
      const double scale = std::max(1.0, l2_norm(base));
      for (const Field& p : perms) {
        double diff = 0.0;
        for (int k = 0; k < basis.n_modes; ++k) {
          diff += (p[k] - base[k]) * (p[k] - base[k]);
        }
        worst = std::max(worst, std::sqrt(diff) / scale);
      }
    }
    report.checks.push_back({"F_symmetric", worst <= 1e-13, worst, ""});
  }

  {
    // ||F(u,v,w)|| / (||u|| ||v|| ||w||) bounded, norms taken in H^1.
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Field u = random_field(basis, seed, 2, 3 * s);
      const Field v = random_field(basis, seed, 2, 3 * s + 1);
      const Field w = random_field(basis, seed, 2, 3 * s + 2);
      const double denom = h_alpha_norm(u, basis, 1.0) *
                           h_alpha_norm(v, basis, 1.0) *
                           h_alpha_norm(w, basis, 1.0);
      if (denom == 0.0) continue;
      const double ratio =
          h_alpha_norm(model.trilinear_F(u, v, w), basis, 1.0) / denom;
      worst = std::max(worst, ratio);
    }
    report.checks.push_back({"F_bounded", worst <= 10.0, worst,
                             "ratio ||F(u,v,w)||_1 / prod ||.||_1"});
  }

  {
    double worst = 0.0;
    const Field zero(basis.n_modes);
    for (int j = 0; j < model.noise_modes; ++j) {
      worst = std::max(worst, l2_norm(model.diffusion_G(zero, j)));
    }
    report.checks.push_back({"G_zero", worst <= 1e-13, worst, ""});
  }

  {
    // <F_c(u,u,w), w> <= 0 for kernel-supported u, w.
    double worst = -1e300;
    for (int s = 0; s < samples; ++s) {
      Field u(basis.n_modes), w(basis.n_modes);
      for (int k = 0; k < basis.kernel_dim; ++k) {
        u[k] = 2.0 * uniform_at(seed, 3, static_cast<std::uint32_t>(k), 2 * s) - 1.0;
        w[k] = 2.0 * uniform_at(seed, 3, static_cast<std::uint32_t>(k), 2 * s + 1) - 1.0;
      }
      const Field fc = project_c(model.trilinear_F(u, u, w), basis);
      double inner = 0.0;
      for (int k = 0; k < basis.kernel_dim; ++k) inner += fc[k] * w[k];
      worst = std::max(worst, inner);
    }
    report.checks.push_back({"F_dissipative_on_kernel", worst <= 1e-12, worst, ""});
  }

  {
    // Finite-difference consistency of the Frechet derivatives at 0.
    const Field u = random_field(basis, seed, 4, 0);
    const std::vector<double> deltas = {1e-2, 1e-3, 1e-4};
    std::vector<double> res1, res2;
    for (double d : deltas) {
      Field du(basis.n_modes);
      for (int k = 0; k < basis.n_modes; ++k) du[k] = d * u[k];
      double r1 = 0.0, r2 = 0.0;
      for (int j = 0; j < model.noise_modes; ++j) {
        const Field g = model.diffusion_G(du, j);
        const Field g1 = model.g_prime0(u, j);
        const Field g2 = model.g_doubleprime0(u, u, j);
        double acc1 = 0.0, acc2 = 0.0;
        for (int k = 0; k < basis.n_modes; ++k) {
          const double lin = g[k] - d * g1[k];
          const double quad = lin - 0.5 * d * d * g2[k];
          acc1 += lin * lin;
          acc2 += quad * quad;
        }
        r1 += acc1;
        r2 += acc2;
      }
      res1.push_back(std::sqrt(r1));
      res2.push_back(std::sqrt(r2));
    }
    // Consistency means the residual decays at least one order faster than
    // the truncation kept; a vanishing next derivative can only steepen it.
    const double slope1 = fit_loglog_slope(deltas, res1);
    const double slope2 = fit_loglog_slope(deltas, res2);
    report.checks.push_back({"G_frechet_order1", slope1 >= 1.9, slope1,
                             "log-log slope of first-order residual"});
    report.checks.push_back({"G_frechet_order2", slope2 >= 2.85, slope2,
                             "log-log slope of second-order residual"});
  }

  return report;
}

}  // namespace ampeq
