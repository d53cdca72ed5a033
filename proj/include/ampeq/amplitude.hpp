#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ampeq/model.hpp"
#include "ampeq/noise.hpp"

namespace ampeq {

enum class CaseTag { CaseI = 1, CaseII = 2 };

/// Kernel-mode amplitude series on the slow grid. a2 is empty for a
/// first-order-only solve. Requires a one-dimensional kernel.
struct AmplitudePath {
  std::vector<double> slow_times;
  std::vector<double> a1;
  std::vector<double> a2;
  CaseTag case_tag = CaseTag::CaseI;
  bool truncated = false;           // hit a non-finite state
  std::int64_t truncated_at = -1;
};

/// Coefficients of the square-root diffusion of the second-order equation:
/// the quadratic variation density is q(b) = sigma1 b^2 + sigma2(a1) b
/// + sigma3(a1), and sigma4(a1) is the linear drift factor.
struct SigmaCoefficients {
  double sigma1 = 0.0;          // value used by the solver (generic route)
  double sigma1_generic = 0.0;  // Hilbert-Schmidt part plus tensor-weighted series
  double sigma1_series = 0.0;   // closed double series (Allen-Cahn noise mode 1)
  bool has_series = false;
  int series_terms = 0;
  std::function<double(double)> sigma2;
  std::function<double(double)> sigma3;
  std::function<double(double)> sigma4;
};

/// Closed-form double series for the constant part of sigma1 in the
/// first-sine-mode noise instance, summed until the increment of square
/// truncations falls below tol. Returns the partial sum at terms_per_index
/// when that is positive.
double case2_sigma1_series(double tol, int* terms_used = nullptr,
                           int terms_per_index = 0);

/// sigma1 two ways (closed series when available, generic tensor pseudo-inverse
/// route always) plus the sigma2/sigma3/sigma4 maps; the two sigma1 routes must
/// agree within 10*tol when both exist.
SigmaCoefficients sigma_coefficients(const ModelSpec& model, double tol);

/// Euler-Maruyama for da1 = [L_c a1 + F_c(a1)] dT + G'_c(0)(a1) dW~ on the
/// slow grid of the supplied rescaled path.
AmplitudePath solve_first_order(const ModelSpec& model, double a1_0,
                                const NoisePath& slow_path, double epsilon);

/// Structural test of the vanishing cross-term condition: either G'(0) maps
/// kernel directions into the kernel, or stable directions into the stable
/// space, for every noise mode.
bool case1_condition_holds(const ModelSpec& model, double tol = 1e-12);

/// Second-order equation when the cross term vanishes, driven by the same
/// increments as a1. Throws std::invalid_argument when the structural
/// condition fails (use the Case II solver instead).
AmplitudePath solve_second_order_case1(const ModelSpec& model, double a2_0,
                                       const AmplitudePath& a1_path,
                                       const NoisePath& slow_path,
                                       double epsilon);

/// Coupling used to realize the driving Brownian motion B of the square-root
/// diffusion equation, which the martingale construction leaves unspecified:
///   SharedSigned: B increments are the W~ increments, sign-aligned with the
///     leading part of the tracked martingale (a Brownian motion by Levy).
///   SharedRaw:    B increments are exactly the W~ increments.
///   Martingale:   delta B = delta M1 / sqrt(q) from a simulated pre-reduction
///     second-order path, with fresh increments where q degenerates.
enum class Case2Driver { SharedSigned, SharedRaw, Martingale };

struct Case2Result {
  AmplitudePath path;
  std::int64_t clamp_count = 0;     // q < 0 evaluations before clamping
  std::int64_t fallback_count = 0;  // fresh increments in Martingale mode
  std::int64_t steps = 0;
};

Case2Result solve_second_order_case2(const ModelSpec& model, double a2_0,
                                     const AmplitudePath& a1_path,
                                     const NoisePath& slow_path,
                                     const SigmaCoefficients& sigmas,
                                     double epsilon,
                                     Case2Driver driver = Case2Driver::SharedSigned);

/// Pre-reduction second-order path: same drift, diffusion
/// G'_c(0)(b) + (1/2) G''_c(0)(a1,a1) + eps^{-1} G'_c(0)(Y) against dW~,
/// with Y the stable stochastic convolution of G'_s(0)(a1).
AmplitudePath solve_case2_pre_reduction(const ModelSpec& model, double a2_0,
                                        const AmplitudePath& a1_path,
                                        const NoisePath& slow_path,
                                        double epsilon);

/// Auxiliary diagnostic equation: drift sigma4 b3, diffusion frozen at the
/// pre-reduction path sqrt(q(b_pre)) dB.
AmplitudePath solve_second_order_case2_frozen(
    const ModelSpec& model, double a2_0, const AmplitudePath& a1_path,
    const AmplitudePath& pre_reduction, const NoisePath& driver,
    const SigmaCoefficients& sigmas);

/// Deterministic initial layer e^{A_s T / eps^2} psi0. psi0 must have no
/// kernel component.
Field fast_mode_Q(const Field& psi0, double T, double epsilon,
                  const SpectralBasis& basis);

/// Stable stochastic-convolution correction by exponential Euler:
/// K_{n+1,k} = e^{-lambda_k dT/eps^2} (K_{n,k} + [G'_s(0)(a1+Q) f_j]_k dW~_j).
/// Returned at steps 0, stride, 2*stride, ...
std::vector<Field> fast_mode_K(const ModelSpec& model,
                               const AmplitudePath& a1_path, const Field& psi0,
                               const NoisePath& slow_path, double epsilon,
                               std::int64_t stride = 1);

struct FastModeState {
  Field Q;
  Field K;
};

/// eps * a1 e_1 + eps * Q + eps * K, plus eps^2 * a2 e_1 at order 2.
/// fast may be empty (treated as zero fields). Sizes must agree.
std::vector<Field> assemble_approximation(int order, std::span<const double> a1,
                                          std::span<const double> a2,
                                          std::span<const FastModeState> fast,
                                          double epsilon,
                                          const SpectralBasis& basis);

}  // namespace ampeq
