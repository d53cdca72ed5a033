#include "ampeq/amplitude.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ampeq/rng.hpp"

namespace ampeq {

namespace {

constexpr double kPi = std::numbers::pi;

void require_scalar_kernel(const ModelSpec& model, const char* who) {
  if (model.basis.kernel_dim != 1) {
    throw std::invalid_argument(std::string(who) +
                                ": requires a one-dimensional kernel");
  }
}

void require_scalar_noise(const NoisePath& path, const char* who) {
  if (path.n_modes != 1) {
    throw std::invalid_argument(std::string(who) +
                                ": requires a single scalar noise mode");
  }
}

// Scalar reduction of the kernel-mode operators for a one-dimensional kernel.
struct KernelScalars {
  double l11 = 0.0;        // <L e1, e1>
  double f111 = 0.0;       // <F(e1,e1,e1), e1>
  std::vector<double> g1;  // <G'(0)(e1) f_j, e1> per noise mode
  std::vector<double> g2h; // (1/2) <G''(0)(e1,e1) f_j, e1> per noise mode
};

KernelScalars kernel_scalars(const ModelSpec& model) {
  const Field e1 = unit_mode(model.basis, 1);
  KernelScalars s;
  s.l11 = model.linear_L(e1)[0];
  s.f111 = model.trilinear_F(e1, e1, e1)[0];
  s.g1.resize(model.noise_modes);
  s.g2h.resize(model.noise_modes);
  for (int j = 0; j < model.noise_modes; ++j) {
    s.g1[j] = model.g_prime0(e1, j)[0];
    s.g2h[j] = 0.5 * model.g_doubleprime0(e1, e1, j)[0];
  }
  return s;
}

std::vector<double> make_times(std::int64_t n_steps, double dt) {
  std::vector<double> t(n_steps + 1);
  for (std::int64_t n = 0; n <= n_steps; ++n) t[n] = n * dt;
  return t;
}

// Stable-mode coefficients of G'(0)(e_k) f_j, rows k = 1..n_modes.
struct GPrimeTable {
  int n_modes = 0;
  int noise_modes = 0;
  std::vector<double> kernel_part;  // [k][j]: <G'(0)(e_k) f_j, e1>
  std::vector<double> stable_e1;    // [j][k]: stable coeffs of G'(0)(e1) f_j
};

GPrimeTable g_prime_table(const ModelSpec& model) {
  GPrimeTable t;
  t.n_modes = model.basis.n_modes;
  t.noise_modes = model.noise_modes;
  t.kernel_part.assign(static_cast<std::size_t>(t.n_modes) * t.noise_modes, 0.0);
  t.stable_e1.assign(static_cast<std::size_t>(t.noise_modes) * t.n_modes, 0.0);
  for (int j = 0; j < t.noise_modes; ++j) {
    const Field ge1 = model.g_prime0(unit_mode(model.basis, 1), j);
    for (int k = model.basis.kernel_dim; k < t.n_modes; ++k) {
      t.stable_e1[static_cast<std::size_t>(j) * t.n_modes + k] = ge1[k];
    }
  }
  for (int k = 1; k <= t.n_modes; ++k) {
    const Field gek = model.g_prime0(unit_mode(model.basis, k), 0);
    t.kernel_part[(k - 1) * t.noise_modes] = gek[0];
    for (int j = 1; j < t.noise_modes; ++j) {
      t.kernel_part[(k - 1) * t.noise_modes + j] =
          model.g_prime0(unit_mode(model.basis, k), j)[0];
    }
  }
  return t;
}

}  // namespace

double case2_sigma1_series(double tol, int* terms_used, int terms_per_index) {
  const double prefactor = 4096.0 / std::pow(kPi, 6.0);
  auto term = [](std::int64_t m, std::int64_t n) {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double d1 = md * md + nd * nd + md + nd;
    const double am = (2.0 * md + 1.0) * (2.0 * md + 1.0);
    double bm = 4.0 * md * md + 4.0 * md - 3.0;
    bm *= bm;
    const double an = (2.0 * nd + 1.0) * (2.0 * nd + 1.0);
    double bn = 4.0 * nd * nd + 4.0 * nd - 3.0;
    bn *= bn;
    return 1.0 / (d1 * am * bm * an * bn);
  };
  const double hs_part = 128.0 / (9.0 * kPi * kPi * kPi);

  if (terms_per_index > 0) {
    double sum = 0.0;
    for (std::int64_t m = 1; m <= terms_per_index; ++m) {
      for (std::int64_t n = 1; n <= terms_per_index; ++n) sum += term(m, n);
    }
    if (terms_used) *terms_used = terms_per_index;
    return prefactor * sum + hs_part;
  }

  if (!(tol > 0.0)) throw std::domain_error("case2_sigma1_series: tol must be positive");
  double sum = 0.0;
  constexpr std::int64_t kMaxIndex = 100000;
  for (std::int64_t size = 1; size <= kMaxIndex; ++size) {
    // L-shaped shell completing the square truncation at this size.
    double shell = 0.0;
    for (std::int64_t m = 1; m <= size; ++m) shell += term(m, size);
    for (std::int64_t n = 1; n < size; ++n) shell += term(size, n);
    sum += shell;
    // Shells decay like size^-11, so the tail is under twice the last shell.
    if (size >= 3 && prefactor * shell * 2.0 < tol) {
      if (terms_used) *terms_used = static_cast<int>(size);
      return prefactor * sum + hs_part;
    }
  }
  throw std::runtime_error("case2_sigma1_series: tail criterion not met");
}

SigmaCoefficients sigma_coefficients(const ModelSpec& model, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("sigma_coefficients: tol must be positive");
  require_scalar_kernel(model, "sigma_coefficients");

  // The constants are one-time quantities; for the built-in family evaluate
  // them on a fine quadrature grid regardless of the simulation resolution.
  if (model.family == ModelFamily::AllenCahn &&
      (model.n_quad < 512 || model.basis.n_modes < 48)) {
    const ModelSpec fine = allen_cahn_model(
        {model.h, 0.5}, std::max(model.basis.n_modes, 48),
        std::max({model.n_quad, 4 * std::max(model.basis.n_modes, 48), 512}),
        model.noise_case);
    return sigma_coefficients(fine, tol);
  }

  SigmaCoefficients out;
  const KernelScalars ks = kernel_scalars(model);
  const double first_term = [&] {
    double acc = 0.0;
    for (double v : ks.g1) acc += v * v;
    return acc;
  }();

  // Tensor pseudo-inverse route: -1/2 sum_l G (I (x)_s A)^{-1}
  // (G'_s(0)(e1) f_l (x)_s G'_s(0)(e1) f_l).
  const GPrimeTable table = g_prime_table(model);
  const int n = model.basis.n_modes;
  const int kd = model.basis.kernel_dim;
  double tensor_part = 0.0;
  for (int l = 0; l < model.noise_modes; ++l) {
    const double* c = table.stable_e1.data() + static_cast<std::size_t>(l) * n;
    for (int k = kd; k < n; ++k) {
      if (c[k] == 0.0) continue;
      for (int j = kd; j < n; ++j) {
        if (c[j] == 0.0) continue;
        double gfac = 0.0;
        for (int lp = 0; lp < model.noise_modes; ++lp) {
          gfac += table.kernel_part[k * model.noise_modes + lp] *
                  table.kernel_part[j * model.noise_modes + lp];
        }
        tensor_part += -0.5 * tensor_inverse_weight(k + 1, j + 1, model.basis) *
                       c[k] * c[j] * gfac;
      }
    }
  }
  out.sigma1_generic = first_term + tensor_part;
  out.sigma1 = out.sigma1_generic;

  if (model.family == ModelFamily::AllenCahn &&
      model.noise_case == NoiseCase::FirstSineMode) {
    out.sigma1_series = case2_sigma1_series(tol, &out.series_terms);
    out.has_series = true;
    // 1e-9 is the trapezoid floor of the tensor route on the fine grid
    if (std::abs(out.sigma1_series - out.sigma1_generic) >
        std::max(10.0 * tol, 1e-9)) {
      throw std::runtime_error(
          "sigma_coefficients: closed series and tensor route disagree");
    }
  }

  const double s2f = [&] {
    double acc = 0.0;
    for (int j = 0; j < model.noise_modes; ++j) acc += ks.g1[j] * 2.0 * ks.g2h[j];
    return acc;
  }();
  const double s3f = [&] {
    double acc = 0.0;
    for (int j = 0; j < model.noise_modes; ++j) acc += ks.g2h[j] * ks.g2h[j];
    return acc;
  }();
  const double l11 = ks.l11;
  const double f111 = ks.f111;
  out.sigma2 = [s2f](double a1) { return s2f * a1 * a1; };
  out.sigma3 = [s3f](double a1) { return s3f * a1 * a1 * a1 * a1; };
  out.sigma4 = [l11, f111](double a1) { return l11 + 3.0 * f111 * a1 * a1; };
  return out;
}

AmplitudePath solve_first_order(const ModelSpec& model, double a1_0,
                                const NoisePath& slow_path, double /*epsilon*/) {
  require_scalar_kernel(model, "solve_first_order");
  if (slow_path.n_modes != model.noise_modes) {
    throw std::invalid_argument("solve_first_order: path/model noise mode mismatch");
  }
  const KernelScalars ks = kernel_scalars(model);
  const std::int64_t n_steps = slow_path.n_steps;
  const double dT = slow_path.dt;

  AmplitudePath out;
  out.slow_times = make_times(n_steps, dT);
  out.a1.resize(n_steps + 1);
  out.a1[0] = a1_0;
  double a = a1_0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    double incr = 0.0;
    for (int j = 0; j < slow_path.n_modes; ++j) {
      incr += ks.g1[j] * slow_path.at(n, j);
    }
    a += dT * (ks.l11 * a + ks.f111 * a * a * a) + a * incr;
    if (!std::isfinite(a)) {
      out.truncated = true;
      out.truncated_at = n + 1;
      out.a1.resize(n + 1);
      out.slow_times.resize(n + 1);
      return out;
    }
    out.a1[n + 1] = a;
  }
  return out;
}

bool case1_condition_holds(const ModelSpec& model, double tol) {
  const SpectralBasis& basis = model.basis;
  bool kernel_to_kernel = true;
  bool stable_to_stable = true;
  for (int j = 0; j < model.noise_modes && kernel_to_kernel; ++j) {
    for (int i = 1; i <= basis.kernel_dim && kernel_to_kernel; ++i) {
      const Field g = model.g_prime0(unit_mode(basis, i), j);
      for (int k = basis.kernel_dim; k < basis.n_modes; ++k) {
        if (std::abs(g[k]) > tol) {
          kernel_to_kernel = false;
          break;
        }
      }
    }
  }
  if (kernel_to_kernel) return true;
  for (int j = 0; j < model.noise_modes && stable_to_stable; ++j) {
    for (int i = basis.kernel_dim + 1; i <= basis.n_modes && stable_to_stable; ++i) {
      const Field g = model.g_prime0(unit_mode(basis, i), j);
      for (int k = 0; k < basis.kernel_dim; ++k) {
        if (std::abs(g[k]) > tol) {
          stable_to_stable = false;
          break;
        }
      }
    }
  }
  return stable_to_stable;
}

AmplitudePath solve_second_order_case1(const ModelSpec& model, double a2_0,
                                       const AmplitudePath& a1_path,
                                       const NoisePath& slow_path,
                                       double /*epsilon*/) {
  require_scalar_kernel(model, "solve_second_order_case1");
  if (!case1_condition_holds(model)) {
    throw std::invalid_argument(
        "solve_second_order_case1: cross term does not vanish structurally; "
        "use the Case II solver");
  }
  const std::int64_t n_steps = slow_path.n_steps;
  if (static_cast<std::int64_t>(a1_path.a1.size()) != n_steps + 1) {
    throw std::invalid_argument("solve_second_order_case1: grid mismatch");
  }
  if (slow_path.n_modes != model.noise_modes) {
    throw std::invalid_argument("solve_second_order_case1: path/model noise mode mismatch");
  }
  const KernelScalars ks = kernel_scalars(model);
  const double dT = slow_path.dt;

  AmplitudePath out;
  out.case_tag = CaseTag::CaseI;
  out.slow_times = make_times(n_steps, dT);
  out.a1 = a1_path.a1;
  out.a2.resize(n_steps + 1);
  out.a2[0] = a2_0;
  double b = a2_0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const double a1 = a1_path.a1[n];
    double noise = 0.0;
    for (int j = 0; j < slow_path.n_modes; ++j) {
      noise += (ks.g1[j] * b + ks.g2h[j] * a1 * a1) * slow_path.at(n, j);
    }
    b += dT * (ks.l11 * b + 3.0 * ks.f111 * a1 * a1 * b) + noise;
    if (!std::isfinite(b)) {
      out.truncated = true;
      out.truncated_at = n + 1;
      out.a2.resize(n + 1);
      return out;
    }
    out.a2[n + 1] = b;
  }
  return out;
}

namespace {

// Exponential-Euler state for the stable stochastic convolutions Y and K.
// The newest increment enters undamped; damping applies from the next step.
struct StableConvolution {
  std::vector<double> decay;  // e^{-lambda_k dt_fast} on stable modes
  std::vector<double> state;  // stable coefficients, kernel entries stay zero
  int kernel_dim;

  StableConvolution(const SpectralBasis& basis, double dt_fast)
      : decay(basis.n_modes, 0.0),
        state(basis.n_modes, 0.0),
        kernel_dim(basis.kernel_dim) {
    for (int k = kernel_dim; k < basis.n_modes; ++k) {
      decay[k] = std::exp(-basis.eigenvalues[k] * dt_fast);
    }
  }

  void step(std::span<const double> forcing_per_mode, double dW) {
    for (int k = kernel_dim; k < static_cast<int>(state.size()); ++k) {
      state[k] = decay[k] * state[k] + forcing_per_mode[k] * dW;
    }
  }
};

}  // namespace

AmplitudePath solve_case2_pre_reduction(const ModelSpec& model, double a2_0,
                                        const AmplitudePath& a1_path,
                                        const NoisePath& slow_path,
                                        double epsilon) {
  require_scalar_kernel(model, "solve_case2_pre_reduction");
  require_scalar_noise(slow_path, "solve_case2_pre_reduction");
  const std::int64_t n_steps = slow_path.n_steps;
  if (static_cast<std::int64_t>(a1_path.a1.size()) != n_steps + 1) {
    throw std::invalid_argument("solve_case2_pre_reduction: grid mismatch");
  }
  const KernelScalars ks = kernel_scalars(model);
  const GPrimeTable table = g_prime_table(model);
  const double dT = slow_path.dt;
  const double dt_fast = dT / (epsilon * epsilon);
  const int n_modes = model.basis.n_modes;

  StableConvolution y(model.basis, dt_fast);
  std::vector<double> forcing(n_modes, 0.0);

  AmplitudePath out;
  out.case_tag = CaseTag::CaseII;
  out.slow_times = make_times(n_steps, dT);
  out.a1 = a1_path.a1;
  out.a2.resize(n_steps + 1);
  out.a2[0] = a2_0;
  double b = a2_0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const double a1 = a1_path.a1[n];
    const double dW = slow_path.at(n, 0);
    // eps^{-1} <G'_c(0)(Y), e1> by linearity over the stable modes of Y.
    double ycross = 0.0;
    for (int k = model.basis.kernel_dim; k < n_modes; ++k) {
      ycross += y.state[k] * table.kernel_part[k * table.noise_modes];
    }
    ycross /= epsilon;
    const double integrand = ks.g1[0] * b + ks.g2h[0] * a1 * a1 + ycross;
    b += dT * (ks.l11 * b + 3.0 * ks.f111 * a1 * a1 * b) + integrand * dW;
    for (int k = model.basis.kernel_dim; k < n_modes; ++k) {
      forcing[k] = a1 * table.stable_e1[k];
    }
    y.step(forcing, dW);
    if (!std::isfinite(b)) {
      out.truncated = true;
      out.truncated_at = n + 1;
      out.a2.resize(n + 1);
      return out;
    }
    out.a2[n + 1] = b;
  }
  return out;
}

Case2Result solve_second_order_case2(const ModelSpec& model, double a2_0,
                                     const AmplitudePath& a1_path,
                                     const NoisePath& slow_path,
                                     const SigmaCoefficients& sigmas,
                                     double epsilon, Case2Driver driver) {
  require_scalar_kernel(model, "solve_second_order_case2");
  require_scalar_noise(slow_path, "solve_second_order_case2");
  const std::int64_t n_steps = slow_path.n_steps;
  if (static_cast<std::int64_t>(a1_path.a1.size()) != n_steps + 1) {
    throw std::invalid_argument("solve_second_order_case2: grid mismatch");
  }
  const KernelScalars ks = kernel_scalars(model);
  const GPrimeTable table = g_prime_table(model);
  const double dT = slow_path.dt;
  const double sqrt_dT = std::sqrt(dT);
  const double dt_fast = dT / (epsilon * epsilon);
  const int n_modes = model.basis.n_modes;
  const int kd = model.basis.kernel_dim;

  const bool martingale = driver == Case2Driver::Martingale;
  StableConvolution y(model.basis, dt_fast);
  std::vector<double> forcing(n_modes, 0.0);
  double b_pre = a2_0;  // pre-reduction path, advanced only in Martingale mode

  Case2Result res;
  res.steps = n_steps;
  AmplitudePath& out = res.path;
  out.case_tag = CaseTag::CaseII;
  out.slow_times = make_times(n_steps, dT);
  out.a1 = a1_path.a1;
  out.a2.resize(n_steps + 1);
  out.a2[0] = a2_0;

  double b = a2_0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const double a1 = a1_path.a1[n];
    const double dW = slow_path.at(n, 0);

    double q = sigmas.sigma1 * b * b + sigmas.sigma2(a1) * b + sigmas.sigma3(a1);
    if (q < 0.0) {
      ++res.clamp_count;
      q = 0.0;
    }

    double dB;
    switch (driver) {
      case Case2Driver::SharedRaw:
        dB = dW;
        break;
      case Case2Driver::SharedSigned: {
        const double leading = ks.g1[0] * b + ks.g2h[0] * a1 * a1;
        dB = leading < 0.0 ? -dW : dW;
        break;
      }
      case Case2Driver::Martingale:
      default: {
        double ycross = 0.0;
        for (int k = kd; k < n_modes; ++k) {
          ycross += y.state[k] * table.kernel_part[k * table.noise_modes];
        }
        ycross /= epsilon;
        const double integrand = ks.g1[0] * b_pre + ks.g2h[0] * a1 * a1 + ycross;
        double q_pre = sigmas.sigma1 * b_pre * b_pre +
                       sigmas.sigma2(a1) * b_pre + sigmas.sigma3(a1);
        const double floor = 1e-14 * std::max(1.0, std::abs(sigmas.sigma3(a1)));
        if (q_pre > floor) {
          dB = integrand * dW / std::sqrt(q_pre);
        } else {
          ++res.fallback_count;
          dB = sqrt_dT * normal_at(slow_path.seed, slow_path.stream, 1u,
                                   static_cast<std::uint64_t>(n));
        }
        b_pre += dT * (ks.l11 * b_pre + 3.0 * ks.f111 * a1 * a1 * b_pre) +
                 integrand * dW;
        for (int k = kd; k < n_modes; ++k) forcing[k] = a1 * table.stable_e1[k];
        y.step(forcing, dW);
        break;
      }
    }

    b += dT * sigmas.sigma4(a1) * b + std::sqrt(q) * dB;
    if (!std::isfinite(b)) {
      out.truncated = true;
      out.truncated_at = n + 1;
      out.a2.resize(n + 1);
      return res;
    }
    out.a2[n + 1] = b;
  }
  return res;
}

AmplitudePath solve_second_order_case2_frozen(
    const ModelSpec& model, double a2_0, const AmplitudePath& a1_path,
    const AmplitudePath& pre_reduction, const NoisePath& driver,
    const SigmaCoefficients& sigmas) {
  require_scalar_kernel(model, "solve_second_order_case2_frozen");
  require_scalar_noise(driver, "solve_second_order_case2_frozen");
  const std::int64_t n_steps = driver.n_steps;
  if (static_cast<std::int64_t>(a1_path.a1.size()) != n_steps + 1 ||
      static_cast<std::int64_t>(pre_reduction.a2.size()) != n_steps + 1) {
    throw std::invalid_argument("solve_second_order_case2_frozen: grid mismatch");
  }
  const double dT = driver.dt;
  AmplitudePath out;
  out.case_tag = CaseTag::CaseII;
  out.slow_times = make_times(n_steps, dT);
  out.a1 = a1_path.a1;
  out.a2.resize(n_steps + 1);
  out.a2[0] = a2_0;
  double b = a2_0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const double a1 = a1_path.a1[n];
    const double b1 = pre_reduction.a2[n];
    const double q = std::max(
        sigmas.sigma1 * b1 * b1 + sigmas.sigma2(a1) * b1 + sigmas.sigma3(a1), 0.0);
    b += dT * sigmas.sigma4(a1) * b + std::sqrt(q) * driver.at(n, 0);
    if (!std::isfinite(b)) {
      out.truncated = true;
      out.truncated_at = n + 1;
      out.a2.resize(n + 1);
      return out;
    }
    out.a2[n + 1] = b;
  }
  return out;
}

Field fast_mode_Q(const Field& psi0, double T, double epsilon,
                  const SpectralBasis& basis) {
  if (static_cast<int>(psi0.size()) != basis.n_modes) {
    throw std::invalid_argument("fast_mode_Q: field/basis length mismatch");
  }
  for (int k = 0; k < basis.kernel_dim; ++k) {
    if (psi0[k] != 0.0) {
      throw std::domain_error("fast_mode_Q: psi0 must have no kernel component");
    }
  }
  if (!(epsilon > 0.0)) throw std::domain_error("fast_mode_Q: epsilon must be positive");
  return semigroup_apply(psi0, basis, T / (epsilon * epsilon));
}

std::vector<Field> fast_mode_K(const ModelSpec& model,
                               const AmplitudePath& a1_path, const Field& psi0,
                               const NoisePath& slow_path, double epsilon,
                               std::int64_t stride) {
  require_scalar_kernel(model, "fast_mode_K");
  if (stride < 1) throw std::invalid_argument("fast_mode_K: stride must be >= 1");
  const std::int64_t n_steps = slow_path.n_steps;
  if (static_cast<std::int64_t>(a1_path.a1.size()) != n_steps + 1) {
    throw std::invalid_argument("fast_mode_K: grid mismatch");
  }
  for (int k = 0; k < model.basis.kernel_dim; ++k) {
    if (psi0[k] != 0.0) {
      throw std::domain_error("fast_mode_K: psi0 must have no kernel component");
    }
  }
  if (slow_path.n_modes != model.noise_modes) {
    throw std::invalid_argument("fast_mode_K: path/model noise mode mismatch");
  }
  const int n_modes = model.basis.n_modes;
  const int kd = model.basis.kernel_dim;
  const double dT = slow_path.dt;
  const double dt_fast = dT / (epsilon * epsilon);

  // G'(0) is linear, so the forcing splits into the a1 e_1 part (precomputed)
  // and the Q part (re-evaluated only while Q is not negligible).
  std::vector<std::vector<double>> base(slow_path.n_modes);
  for (int j = 0; j < slow_path.n_modes; ++j) {
    const Field g = model.g_prime0(unit_mode(model.basis, 1), j);
    base[j].assign(g.coeffs.begin(), g.coeffs.end());
    for (int k = 0; k < kd; ++k) base[j][k] = 0.0;
  }
  double q_norm0 = 0.0;
  for (double c : psi0.coeffs) q_norm0 += c * c;
  q_norm0 = std::sqrt(q_norm0);

  StableConvolution conv(model.basis, dt_fast);
  std::vector<double> forcing(n_modes, 0.0);
  std::vector<Field> snapshots;
  snapshots.reserve(static_cast<std::size_t>(n_steps / stride) + 2);

  auto snapshot = [&]() {
    Field f(n_modes);
    for (int k = kd; k < n_modes; ++k) f[k] = conv.state[k];
    snapshots.push_back(std::move(f));
  };
  snapshot();

  const double lambda_gap = model.basis.eigenvalues[kd];
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const double a1 = a1_path.a1[n];
    const double q_scale = q_norm0 * std::exp(-lambda_gap * n * dt_fast);
    for (int j = 0; j < slow_path.n_modes; ++j) {
      for (int k = kd; k < n_modes; ++k) forcing[k] = a1 * base[j][k];
      if (q_scale > 1e-16) {
        const Field q = semigroup_apply(psi0, model.basis, n * dt_fast);
        const Field gq = model.g_prime0(q, j);
        for (int k = kd; k < n_modes; ++k) forcing[k] += gq[k];
      }
      conv.step(forcing, slow_path.at(n, j));
    }
    if ((n + 1) % stride == 0 || n + 1 == n_steps) snapshot();
  }
  return snapshots;
}

std::vector<Field> assemble_approximation(int order, std::span<const double> a1,
                                          std::span<const double> a2,
                                          std::span<const FastModeState> fast,
                                          double epsilon,
                                          const SpectralBasis& basis) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("assemble_approximation: order must be 1 or 2");
  }
  const std::size_t n = a1.size();
  if (order == 2 && a2.size() != n) {
    throw std::invalid_argument("assemble_approximation: grid mismatch (a2)");
  }
  if (!fast.empty() && fast.size() != n) {
    throw std::invalid_argument("assemble_approximation: grid mismatch (fast)");
  }
  std::vector<Field> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Field f(basis.n_modes);
    f[0] = epsilon * a1[i];
    if (order == 2) f[0] += epsilon * epsilon * a2[i];
    if (!fast.empty()) {
      const Field& q = fast[i].Q;
      const Field& k = fast[i].K;
      if (static_cast<int>(q.size()) != basis.n_modes ||
          static_cast<int>(k.size()) != basis.n_modes) {
        throw std::invalid_argument("assemble_approximation: field size mismatch");
      }
      for (int m = 0; m < basis.n_modes; ++m) {
        f[m] += epsilon * (q[m] + k[m]);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ampeq
