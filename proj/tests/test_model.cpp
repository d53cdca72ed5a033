#include <cmath>
#include <numbers>

#include <stdexcept>

#include <doctest.h>

#include "ampeq/model.hpp"

using namespace ampeq;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpec ac(double h, NoiseCase noise, int n_modes = 32, int n_quad = 128) {
  return allen_cahn_model({h, 0.1}, n_modes, n_quad, noise);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(allen_cahn_model({20.0, 0.1}, 32, 100, NoiseCase::SpatiallyUniform),
                  std::invalid_argument);  // aliasing
  CHECK_THROWS_AS(allen_cahn_model({20.0, 1.5}, 32, 128, NoiseCase::SpatiallyUniform),
                  std::invalid_argument);  // epsilon out of (0,1)
}

TEST_CASE("cubic self-interaction projections match closed forms") {
  const auto model = ac(20.0, NoiseCase::SpatiallyUniform, 64, 512);
  CHECK(projected_coefficient(model, Coefficient::F111) ==
        doctest::Approx(-3.0 / (2.0 * kPi)).epsilon(1e-12));
  CHECK(projected_coefficient(model, Coefficient::FSecondDrift) ==
        doctest::Approx(-9.0 / (2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("noise projections, uniform multiplier") {
  const double h = 20.0;
  const auto model = ac(h, NoiseCase::SpatiallyUniform, 64, 512);
  // G'(0)(e1) * 1 projects straight back onto e1
  CHECK(projected_coefficient(model, Coefficient::GcE1E1) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double c1 = 8.0 * std::sqrt(2.0) / (3.0 * std::pow(kPi, 1.5));
  CHECK(projected_coefficient(model, Coefficient::Case1SecondNoise) ==
        doctest::Approx(-0.5 * (h * h - 1.0) * c1).epsilon(1e-10));
}

TEST_CASE("noise projections, first sine mode") {
  const double h = 10.0;
  const auto model = ac(h, NoiseCase::FirstSineMode, 64, 512);
  const double c1 = 8.0 * std::sqrt(2.0) / (3.0 * std::pow(kPi, 1.5));
  // three-sine products carry the O(n_quad^-4) trapezoid remainder, ~1e-11
  CHECK(projected_coefficient(model, Coefficient::GcE1E1) ==
        doctest::Approx(c1).epsilon(1e-10));
  CHECK(projected_coefficient(model, Coefficient::Sigma1FirstTerm) ==
        doctest::Approx(128.0 / (9.0 * kPi * kPi * kPi)).epsilon(1e-10));
  CHECK(projected_coefficient(model, Coefficient::Sigma2Factor) ==
        doctest::Approx(-(h * h - 1.0) * std::pow(2.0 / kPi, 2.5)).epsilon(1e-10));
  CHECK(projected_coefficient(model, Coefficient::Sigma3Factor) ==
        doctest::Approx(9.0 * (h * h - 1.0) * (h * h - 1.0) / (16.0 * kPi * kPi))
            .epsilon(1e-10));
}

TEST_CASE("string tags resolve and unknown tags are rejected") {
  const auto model = ac(20.0, NoiseCase::SpatiallyUniform);
  CHECK(projected_coefficient(model, "F111") ==
        projected_coefficient(model, Coefficient::F111));
  CHECK_THROWS_AS(projected_coefficient(model, "no_such_tag"),
                  std::invalid_argument);
}

TEST_CASE("first Frechet derivative matches a finite-difference oracle") {
  const auto model = ac(20.0, NoiseCase::SpatiallyUniform);
  const Field e1 = unit_mode(model.basis, 1);
  const Field g1 = model.g_prime0(e1, 0);
  double prev_ratio = 0.0;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    Field de1(model.basis.n_modes);
    de1[0] = delta;
    const Field g = model.diffusion_G(de1, 0);
    double resid = 0.0;
    for (int k = 0; k < model.basis.n_modes; ++k) {
      const double d = g[k] - delta * g1[k];
      resid += d * d;
    }
    resid = std::sqrt(resid);
    CHECK(resid <= 250.0 * delta * delta);  // C delta^2 with C ~ |g''| scale
    if (prev_ratio != 0.0) {
      // each decade in delta shrinks the residual by about two decades
      CHECK(resid / prev_ratio <= 2e-2);
    }
    prev_ratio = resid;
  }
}

TEST_CASE("fused stepper path agrees with the generic maps") {
  const auto model = ac(7.0, NoiseCase::FirstSineMode);
  Field u(model.basis.n_modes);
  u[0] = 0.3;
  u[2] = -0.12;
  u[5] = 0.07;
  Field f;
  std::vector<Field> g;
  RhsWorkspace ws;
  model.fused_rhs(u, ws, f, g);
  const Field f_ref = model.trilinear_F(u, u, u);
  const Field g_ref = model.diffusion_G(u, 0);
  for (int k = 0; k < model.basis.n_modes; ++k) {
    CHECK(f[k] == doctest::Approx(f_ref[k]).epsilon(1e-14));
    CHECK(g[0][k] == doctest::Approx(g_ref[k]).epsilon(1e-14));
  }
}

TEST_CASE("assumption checks pass for the built-in model") {
  for (NoiseCase noise : {NoiseCase::SpatiallyUniform, NoiseCase::FirstSineMode}) {
    const auto model = ac(20.0, noise);
    const auto report = validate_assumptions(model, 25, 7);
    for (const auto& c : report.checks) {
      INFO(c.name, " residual=", c.residual);
      CHECK(c.passed);
    }
  }
}

TEST_CASE("frechet residual of the built-in model decays quadratically") {
  const auto model = ac(20.0, NoiseCase::SpatiallyUniform);
  const auto report = validate_assumptions(model, 5, 3);
  for (const auto& c : report.checks) {
    if (c.name == "G_frechet_order1") {
      CHECK(c.residual == doctest::Approx(2.0).epsilon(0.05));
    }
  }
}

TEST_CASE("violated zero condition is detected") {
  auto model = ac(20.0, NoiseCase::SpatiallyUniform);
  const auto grid = model.grid;
  // G(u) = sin u keeps G(0) = 0; G(u) = cos u breaks it.
  auto nemytskii = [grid](double (*fn)(double)) {
    return [grid, fn](const Field& u, int) {
      std::vector<double> values(grid->n_points());
      grid->to_grid(u, values);
      for (double& v : values) v = fn(v);
      return grid->to_coeffs(values);
    };
  };
  model.fused_rhs = nullptr;

  ModelSpec sin_model = model;
  sin_model.diffusion_G = nemytskii(+[](double y) { return std::sin(y); });
  const auto sin_report = validate_assumptions(sin_model, 4, 11);
  for (const auto& c : sin_report.checks) {
    if (c.name == "G_zero") CHECK(c.passed);
  }

  ModelSpec cos_model = model;
  cos_model.diffusion_G = nemytskii(+[](double y) { return std::cos(y); });
  const auto cos_report = validate_assumptions(cos_model, 4, 11);
  bool found = false;
  for (const auto& c : cos_report.checks) {
    if (c.name == "G_zero") {
      CHECK_FALSE(c.passed);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("trilinear map is symmetric to machine precision") {
  const auto model = ac(5.0, NoiseCase::SpatiallyUniform);
  const auto report = validate_assumptions(model, 100, 19);
  for (const auto& c : report.checks) {
    if (c.name == "F_symmetric") {
      CHECK(c.passed);
      CHECK(c.residual <= 1e-13);
    }
  }
}

}  // TEST_SUITE
