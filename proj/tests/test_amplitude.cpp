#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "ampeq/amplitude.hpp"
#include "ampeq/experiment.hpp"

using namespace ampeq;

namespace {

constexpr double kPi = std::numbers::pi;

NoisePath manual_path(double dt, std::vector<double> incr) {
  NoisePath p;
  p.dt = dt;
  p.n_steps = static_cast<std::int64_t>(incr.size());
  p.n_modes = 1;
  p.increments = std::move(incr);
  return p;
}

// Coarsen a path by summing groups of `factor` increments.
NoisePath coarsen(const NoisePath& fine, std::int64_t factor) {
  NoisePath c;
  c.dt = fine.dt * factor;
  c.n_steps = fine.n_steps / factor;
  c.n_modes = 1;
  c.increments.assign(c.n_steps, 0.0);
  for (std::int64_t n = 0; n < c.n_steps; ++n) {
    for (std::int64_t i = 0; i < factor; ++i) {
      c.increments[n] += fine.at(n * factor + i, 0);
    }
  }
  return c;
}

ModelSpec cubic_disabled(double h, NoiseCase noise) {
  ModelSpec m = allen_cahn_model({h, 0.1}, 16, 64, noise);
  m.trilinear_F = [](const Field& u, const Field&, const Field&) {
    return Field(u.size());
  };
  m.fused_rhs = nullptr;
  return m;
}

}  // namespace

TEST_SUITE("amplitude") {

TEST_CASE("first order: rest point and single-step arithmetic") {
  const auto model = allen_cahn_model({20.0, 0.1}, 16, 64, NoiseCase::SpatiallyUniform);

  const auto zero = solve_first_order(model, 0.0, manual_path(0.1, {0.3, -0.2}), 0.1);
  CHECK(zero.a1 == std::vector<double>{0.0, 0.0, 0.0});

  // one Euler-Maruyama step from a1 = 1: drift 1 - 3/(2 pi), noise coeff 1
  const double w = 0.05;
  const auto one = solve_first_order(model, 1.0, manual_path(0.01, {w}), 0.1);
  CHECK(one.a1[1] ==
        doctest::Approx(1.0 + 0.01 * (1.0 - 3.0 / (2.0 * kPi)) + w).epsilon(1e-14));
}

TEST_CASE("first order: strong order 1/2 against the lognormal oracle") {
  const auto model = cubic_disabled(20.0, NoiseCase::SpatiallyUniform);
  const int n_paths = 200;
  const std::int64_t fine_steps = 1 << 8;
  const double fine_dt = 1.0 / fine_steps;
  std::vector<std::pair<double, double>> pts;
  for (int level = 0; level < 4; ++level) {
    const std::int64_t factor = 1 << level;  // dT in {2^-8 .. 2^-5}
    double err = 0.0;
    for (int s = 0; s < n_paths; ++s) {
      const auto fine = sample_path(fine_dt, fine_steps, 1, 314, s);
      const auto path = coarsen(fine, factor);
      double wt = 0.0;
      for (double v : fine.increments) wt += v;
      const double exact = std::exp((1.0 - 0.5) * 1.0 + wt);
      const auto em = solve_first_order(model, 1.0, path, 0.1);
      err += std::abs(em.a1.back() - exact);
    }
    pts.emplace_back(fine_dt * factor, err / n_paths);
  }
  const auto fit = fit_convergence_order(pts);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(0.35));
}

TEST_CASE("second order case 1: closed-form coefficients appear in one step") {
  const double h = 20.0;
  const auto model = allen_cahn_model({h, 0.1}, 32, 128, NoiseCase::SpatiallyUniform);
  AmplitudePath a1;
  a1.a1 = {1.0, 1.0};
  a1.slow_times = {0.0, 0.01};

  // zero noise: drift of a2 at a1 = 1, a2 = 1 is 1 - 9/(2 pi)
  const auto drift = solve_second_order_case1(model, 1.0, a1, manual_path(0.01, {0.0}), 0.1);
  CHECK(drift.a2[1] ==
        doctest::Approx(1.0 + 0.01 * (1.0 - 9.0 / (2.0 * kPi))).epsilon(1e-13));

  // pure noise step from a2 = 0: coefficient -4 (h^2-1) sqrt(2) / (3 pi^{3/2})
  const double w = 0.02;
  const auto noise = solve_second_order_case1(model, 0.0, a1, manual_path(0.01, {w}), 0.1);
  const double coeff = -4.0 * (h * h - 1.0) * std::sqrt(2.0) / (3.0 * std::pow(kPi, 1.5));
  // quadrature remainder at n_quad = 128 sits near 1e-8 relative
  CHECK(noise.a2[1] == doctest::Approx(coeff * w).epsilon(1e-7));
  CHECK(std::abs(coeff) == doctest::Approx(135.11).epsilon(1e-3));

  // both drift and noise vanish on the double rest point
  AmplitudePath rest;
  rest.a1 = {0.0, 0.0};
  rest.slow_times = {0.0, 0.01};
  const auto zero = solve_second_order_case1(model, 0.0, rest, manual_path(0.01, {0.4}), 0.1);
  CHECK(zero.a2 == std::vector<double>{0.0, 0.0});
}

TEST_CASE("case 1 solver rejects a model with a live cross term") {
  const auto model = allen_cahn_model({10.0, 0.1}, 16, 64, NoiseCase::FirstSineMode);
  CHECK_FALSE(case1_condition_holds(model));
  AmplitudePath a1;
  a1.a1 = {1.0, 1.0};
  CHECK_THROWS_AS(
      solve_second_order_case1(model, 0.0, a1, manual_path(0.01, {0.0}), 0.1),
      std::invalid_argument);

  const auto uniform = allen_cahn_model({10.0, 0.1}, 16, 64, NoiseCase::SpatiallyUniform);
  CHECK(case1_condition_holds(uniform));
}

TEST_CASE("sigma series: monotone, stable, and reconciled") {
  const double s200 = case2_sigma1_series(1e-12, nullptr, 200);
  const double s400 = case2_sigma1_series(1e-12, nullptr, 400);
  CHECK(std::abs(s400 - s200) <= 1e-10);

  double prev = 0.0;
  for (int terms : {1, 2, 4, 16, 64}) {
    const double s = case2_sigma1_series(1e-12, nullptr, terms);
    CHECK(s > prev);
    prev = s;
  }
  // the series strictly exceeds its Hilbert-Schmidt part
  CHECK(prev > 128.0 / (9.0 * kPi * kPi * kPi));

  int terms_used = 0;
  const double adaptive = case2_sigma1_series(1e-12, &terms_used);
  CHECK(terms_used >= 3);
  CHECK(std::abs(adaptive - s400) <= 1e-11);
}

TEST_CASE("sigma coefficients for the first-sine-mode instance") {
  const double h = 10.0;
  const auto model = allen_cahn_model({h, 0.1}, 64, 512, NoiseCase::FirstSineMode);
  const auto sig = sigma_coefficients(model, 1e-9);
  CHECK(sig.has_series);
  CHECK(std::abs(sig.sigma1_series - sig.sigma1_generic) <= 1e-8);
  CHECK(sig.sigma1 > 0.0);

  CHECK(sig.sigma2(1.0) ==
        doctest::Approx(-(h * h - 1.0) * std::pow(2.0 / kPi, 2.5)).epsilon(1e-10));
  CHECK(sig.sigma3(2.0) ==
        doctest::Approx(16.0 * 9.0 * (h * h - 1.0) * (h * h - 1.0) /
                        (16.0 * kPi * kPi)).epsilon(1e-10));
  CHECK(sig.sigma4(1.0) == doctest::Approx(1.0 - 9.0 / (2.0 * kPi)).epsilon(1e-12));

  CHECK_THROWS_AS(sigma_coefficients(model, -1.0), std::domain_error);
}

TEST_CASE("second-derivative factors vanish at h = 1") {
  const auto model = allen_cahn_model({1.0, 0.1}, 32, 128, NoiseCase::FirstSineMode);
  CHECK(std::abs(projected_coefficient(model, Coefficient::Sigma3Factor)) <= 1e-15);
  CHECK(std::abs(projected_coefficient(model, Coefficient::Sigma2Factor)) <= 1e-15);
}

TEST_CASE("quadratic variation density is nonnegative on a grid") {
  for (double h : {2.0, 10.0, 30.0}) {
    const auto model = allen_cahn_model({h, 0.1}, 32, 128, NoiseCase::FirstSineMode);
    const auto sig = sigma_coefficients(model, 1e-8);
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double b = -10.0 + i;
        const double b1 = -10.0 + j;
        const double q = sig.sigma1 * b * b + sig.sigma2(b1) * b + sig.sigma3(b1);
        CHECK(q >= -1e-12);
      }
    }
  }
}

TEST_CASE("second order case 2: rest point and drift factor") {
  const auto model = allen_cahn_model({10.0, 0.1}, 32, 128, NoiseCase::FirstSineMode);
  const auto sig = sigma_coefficients(model, 1e-8);

  AmplitudePath rest;
  rest.a1 = {0.0, 0.0, 0.0};
  const auto r = solve_second_order_case2(model, 0.0, rest,
                                          manual_path(0.01, {0.5, -0.3}), sig, 0.1);
  CHECK(r.path.a2 == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(r.clamp_count == 0);

  AmplitudePath live;
  live.a1 = {1.0, 1.0};
  const auto d = solve_second_order_case2(model, 1.0, live, manual_path(0.01, {0.0}),
                                          sig, 0.1);
  // with a zero increment only the sigma4 drift acts
  CHECK(d.path.a2[1] ==
        doctest::Approx(1.0 + 0.01 * (1.0 - 9.0 / (2.0 * kPi))).epsilon(1e-12));
}

TEST_CASE("case 2 drivers stay finite and clamp-free on the built-in model") {
  const auto model = allen_cahn_model({10.0, 0.05}, 16, 64, NoiseCase::FirstSineMode);
  const auto sig = sigma_coefficients(model, 1e-8);
  const double eps = 0.05;
  const auto fast = sample_path(1e-2, 4000, 1, 77, 0);
  const auto slow = rescale_to_slow(fast, eps);
  const auto a1 = solve_first_order(model, 1.0, slow, eps);
  for (auto driver : {Case2Driver::SharedSigned, Case2Driver::SharedRaw,
                      Case2Driver::Martingale}) {
    const auto r = solve_second_order_case2(model, 0.0, a1, slow, sig, eps, driver);
    CHECK_FALSE(r.path.truncated);
    CHECK(r.clamp_count == 0);
    for (double v : r.path.a2) CHECK(std::isfinite(v));
  }
}

TEST_CASE("frozen-diffusion diagnostic equation runs on the same grid") {
  const auto model = allen_cahn_model({10.0, 0.05}, 16, 64, NoiseCase::FirstSineMode);
  const auto sig = sigma_coefficients(model, 1e-8);
  const double eps = 0.05;
  const auto slow = rescale_to_slow(sample_path(1e-2, 2000, 1, 78, 0), eps);
  const auto a1 = solve_first_order(model, 1.0, slow, eps);
  const auto pre = solve_case2_pre_reduction(model, 0.0, a1, slow, eps);
  CHECK_FALSE(pre.truncated);
  const auto b3 = solve_second_order_case2_frozen(model, 0.0, a1, pre, slow, sig);
  CHECK(b3.a2.size() == a1.a1.size());
  for (double v : b3.a2) CHECK(std::isfinite(v));
}

TEST_CASE("initial layer Q") {
  const auto basis = SpectralBasis::allen_cahn(8);
  Field psi0(8);
  psi0[1] = 1.0;
  const double eps = 0.1;
  CHECK(fast_mode_Q(Field(8), 0.5, eps, basis).all_finite());
  const Field q = fast_mode_Q(psi0, eps * eps, eps, basis);
  CHECK(q[1] == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

  for (double T : {0.01, 0.1, 1.0}) {
    const Field qt = fast_mode_Q(psi0, T, eps, basis);
    CHECK(h_alpha_norm(qt, basis, 0.0) <=
          std::exp(-3.0 * T / (eps * eps)) * (1.0 + 1e-12));
  }

  Field bad(8);
  bad[0] = 0.5;
  CHECK_THROWS_AS(fast_mode_Q(bad, 0.1, eps, basis), std::domain_error);
}

TEST_CASE("K vanishes structurally under spatially uniform noise") {
  const auto model = allen_cahn_model({20.0, 0.1}, 16, 64, NoiseCase::SpatiallyUniform);
  const double eps = 0.1;
  const auto slow = rescale_to_slow(sample_path(1e-2, 500, 1, 5, 0), eps);
  const auto a1 = solve_first_order(model, 1.0, slow, eps);
  const auto k = fast_mode_K(model, a1, Field(16), slow, eps, 100);
  for (const auto& f : k) {
    for (double c : f.coeffs) CHECK(std::abs(c) <= 1e-13);
  }
}

TEST_CASE("K single-step base case and kernel support") {
  const auto model = allen_cahn_model({10.0, 0.1}, 16, 64, NoiseCase::FirstSineMode);
  const double eps = 0.1;
  const double w = 0.3;
  AmplitudePath a1;
  a1.a1 = {2.0, 2.0};
  const auto k = fast_mode_K(model, a1, Field(16), manual_path(0.01, {w}), eps, 1);
  REQUIRE(k.size() == 2);
  const Field base = model.g_prime0(unit_mode(model.basis, 1), 0);
  for (int m = 1; m < 16; ++m) {
    CHECK(k[1][m] == doctest::Approx(2.0 * base[m] * w).epsilon(1e-14));
  }
  CHECK(k[0][0] == 0.0);
  CHECK(k[1][0] == 0.0);  // kernel coefficient never written

  // zero noise, zero psi0: K stays identically zero
  const auto k0 = fast_mode_K(model, a1, Field(16), manual_path(0.01, {0.0}), eps, 1);
  for (const auto& f : k0) {
    for (double c : f.coeffs) CHECK(c == 0.0);
  }
}

TEST_CASE("assembled approximations") {
  const auto basis = SpectralBasis::allen_cahn(4);
  const std::vector<double> a1 = {1.0, 2.0};
  const std::vector<double> a2 = {0.5, -0.5};
  const double eps = 0.1;

  const auto zero = assemble_approximation(1, std::vector<double>{0.0, 0.0}, {},
                                           {}, eps, basis);
  for (const auto& f : zero) {
    for (double c : f.coeffs) CHECK(c == 0.0);
  }

  const auto first = assemble_approximation(1, a1, {}, {}, eps, basis);
  const auto second = assemble_approximation(2, a1, a2, {}, eps, basis);
  CHECK(first[1][0] == doctest::Approx(eps * 2.0));
  CHECK(second[1][0] == doctest::Approx(eps * 2.0 + eps * eps * -0.5));
  for (int m = 1; m < 4; ++m) {
    CHECK(first[0][m] == 0.0);  // kernel-only when the fast modes are absent
    CHECK(second[0][m] == 0.0);
  }

  // doubling epsilon doubles the order-1 field at fixed paths
  const auto twice = assemble_approximation(1, a1, {}, {}, 2.0 * eps, basis);
  for (std::size_t i = 0; i < a1.size(); ++i) {
    CHECK(twice[i][0] == doctest::Approx(2.0 * first[i][0]));
  }

  std::vector<FastModeState> fast(1);
  CHECK_THROWS_AS(assemble_approximation(1, a1, {}, fast, eps, basis),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_approximation(3, a1, a2, {}, eps, basis),
                  std::invalid_argument);
}

}  // TEST_SUITE
