#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ampeq/spectral.hpp"

namespace ampeq {

/// Noise geometry of the driving Wiener process.
///   SpatiallyUniform: one scalar Brownian motion acting through g(u(x)) * 1.
///   FirstSineMode:    W(t) = e_1(x) * beta(t).
enum class NoiseCase { SpatiallyUniform, FirstSineMode };

enum class ModelFamily { Custom, AllenCahn };

struct AllenCahnParams {
  double h = 0.0;
  double epsilon = 0.1;
};

struct RhsWorkspace {
  std::vector<double> grid_u;
  std::vector<double> grid_tmp;
};

/// Operator bundle behind the SPDE and the amplitude equations. All maps are
/// pure; a constructed ModelSpec is immutable and freely shareable.
struct ModelSpec {
  SpectralBasis basis;
  int n_quad = 0;
  int noise_modes = 0;

  std::function<Field(const Field&)> linear_L;
  std::function<Field(const Field&, const Field&, const Field&)> trilinear_F;
  /// State-dependent diffusion applied to noise mode j (0-based).
  std::function<Field(const Field&, int)> diffusion_G;
  /// First Frechet derivative of G at 0 applied to (u, mode j).
  std::function<Field(const Field&, int)> g_prime0;
  /// Second Frechet derivative of G at 0 applied to (u1, u2, mode j).
  std::function<Field(const Field&, const Field&, int)> g_doubleprime0;

  /// Optional fused evaluation of F(u) and G(u)f_j for the time stepper;
  /// equals the generic maps but collocates u only once.
  std::function<void(const Field& u, RhsWorkspace&, Field& f_out,
                     std::vector<Field>& g_out)>
      fused_rhs;

  ModelFamily family = ModelFamily::Custom;
  NoiseCase noise_case = NoiseCase::SpatiallyUniform;
  double h = 0.0;

  std::shared_ptr<const Collocation> grid;
};

/// Stochastic Allen-Cahn bundle on [0, pi]: lambda_k = k^2 - 1, L = I,
/// F(u,v,w) = -P(uvw) by dealiased collocation, and Nemytskii diffusion
/// g(u) = sin u - cos u + cos(hu) multiplied against the chosen noise mode.
/// Requires n_quad >= 4 * n_modes.
ModelSpec allen_cahn_model(const AllenCahnParams& params, int n_modes,
                           int n_quad, NoiseCase noise_case);

/// Catalog of named projected inner products, each evaluated by quadrature
/// through the model's operator maps (never by closed form).
enum class Coefficient {
  F111,             // <F(e1,e1,e1), e1>
  FSecondDrift,     // 3 <F(e1,e1,e1), e1>, the cubic drift factor at second order
  GcE1E1,           // <G'(0)(e1) f_1, e1>, the first-order noise factor
  GccE1E1Proj,      // <G''(0)(e1,e1) f_1, e1>
  Case1SecondNoise, // (1/2) <G''(0)(e1,e1) f_1, e1>
  Sigma1FirstTerm,  // sum_j <G'(0)(e1) f_j, e1>^2
  Sigma2Factor,     // sum_j <G'(0)(e1) f_j, e1> <G''(0)(e1,e1) f_j, e1>
  Sigma3Factor,     // (1/4) sum_j <G''(0)(e1,e1) f_j, e1>^2
};

double projected_coefficient(const ModelSpec& model, Coefficient tag);
double projected_coefficient(const ModelSpec& model, const std::string& tag);

std::vector<std::pair<std::string, Coefficient>> coefficient_catalog();

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

/// Randomized contract checks: F symmetry, F boundedness, G(0) = 0, kernel
/// dissipativity, and finite-difference consistency of G'(0) and G''(0).
/// Report-only; never throws on a failed check.
ValidationReport validate_assumptions(const ModelSpec& model, int samples,
                                      std::uint64_t seed);

/// Basis vector e_k as a Field (k is 1-based).
Field unit_mode(const SpectralBasis& basis, int k);

}  // namespace ampeq
