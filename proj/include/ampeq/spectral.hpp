#pragma once

#include <span>
#include <vector>

namespace ampeq {

/// Truncated sine-series field on [0, pi]: coeffs[k-1] is the coefficient of
/// e_k(x) = sqrt(2/pi) sin(kx). The basis is orthonormal in L2, so the L2 norm
/// of the represented function equals the Euclidean norm of the coefficients.
struct Field {
  std::vector<double> coeffs;

  Field() = default;
  explicit Field(std::size_t n_modes) : coeffs(n_modes, 0.0) {}

  std::size_t size() const { return coeffs.size(); }
  double& operator[](std::size_t k) { return coeffs[k]; }
  double operator[](std::size_t k) const { return coeffs[k]; }

  bool all_finite() const;
};

/// Diagonalized linear operator: -A e_k = lambda_k e_k with nondecreasing
/// eigenvalues whose leading kernel_dim entries are exactly zero.
struct SpectralBasis {
  int n_modes = 0;
  std::vector<double> eigenvalues;
  int kernel_dim = 0;

  /// lambda_k = k^2 - 1 on [0, pi] with Dirichlet conditions; one-dimensional kernel.
  static SpectralBasis allen_cahn(int n_modes);

  /// Throws std::invalid_argument if the eigenvalue layout is inconsistent.
  void validate() const;
};

/// Collocation grid x_i = i*pi/n_quad, i = 1..n_quad-1, with trapezoid
/// quadrature weights. Sine modes up to n_quad-1 are exactly orthogonal under
/// the discrete inner product, which makes pointwise products of up to four
/// truncated fields integrate exactly when n_quad >= 4 * n_modes.
class Collocation {
 public:
  Collocation(int n_modes, int n_quad);

  int n_modes() const { return n_modes_; }
  int n_quad() const { return n_quad_; }
  int n_points() const { return n_quad_ - 1; }
  std::span<const double> points() const { return points_; }
  double weight() const { return weight_; }

  /// Values of e_k on the grid, k is 1-based.
  std::span<const double> mode_values(int k) const;

  void to_grid(const Field& f, std::span<double> values) const;
  Field to_coeffs(std::span<const double> values) const;

  /// Trapezoid integral of grid values (integrand must vanish at 0 and pi).
  double integrate(std::span<const double> values) const;

 private:
  int n_modes_;
  int n_quad_;
  double weight_;
  std::vector<double> points_;
  std::vector<double> basis_;  // row k-1: e_k at the grid points
};

double h_alpha_norm(const Field& f, const SpectralBasis& basis, double alpha);

Field project_c(const Field& f, const SpectralBasis& basis);
Field project_s(const Field& f, const SpectralBasis& basis);

/// Coefficient-wise exp(-lambda_k t); t = 0 is the identity. t < 0 throws.
Field semigroup_apply(const Field& f, const SpectralBasis& basis, double t);

/// Reciprocal eigenvalue -2/(lambda_k + lambda_j) of the symmetric tensor
/// product of the identity with A, with the pseudo-inverse convention that
/// kernel (x) kernel pairs map to zero. Mode indices are 1-based.
double tensor_inverse_weight(int k, int j, const SpectralBasis& basis);

}  // namespace ampeq
