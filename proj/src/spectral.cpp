#include "ampeq/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ampeq {

namespace {

void check_same_length(const Field& f, const SpectralBasis& basis) {
  if (static_cast<int>(f.size()) != basis.n_modes) {
    throw std::invalid_argument("field/basis length mismatch");
  }
}

}  // namespace

bool Field::all_finite() const {
  for (double c : coeffs) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

SpectralBasis SpectralBasis::allen_cahn(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be positive");
  SpectralBasis b;
  b.n_modes = n_modes;
  b.kernel_dim = 1;
  b.eigenvalues.resize(n_modes);
  for (int k = 1; k <= n_modes; ++k) {
    b.eigenvalues[k - 1] = static_cast<double>(k) * k - 1.0;
  }
  return b;
}

void SpectralBasis::validate() const {
  if (n_modes < 1 || static_cast<int>(eigenvalues.size()) != n_modes) {
    throw std::invalid_argument("basis: eigenvalue count mismatch");
  }
  if (kernel_dim < 1 || kernel_dim > n_modes) {
    throw std::invalid_argument("basis: kernel_dim out of range");
  }
  for (int k = 0; k < n_modes; ++k) {
    if (k > 0 && eigenvalues[k] < eigenvalues[k - 1]) {
      throw std::invalid_argument("basis: eigenvalues must be nondecreasing");
    }
    const bool in_kernel = k < kernel_dim;
    if (in_kernel && eigenvalues[k] != 0.0) {
      throw std::invalid_argument("basis: kernel eigenvalues must vanish");
    }
    if (!in_kernel && eigenvalues[k] <= 0.0) {
      throw std::invalid_argument("basis: stable eigenvalues must be positive");
    }
  }
}

Collocation::Collocation(int n_modes, int n_quad)
    : n_modes_(n_modes), n_quad_(n_quad) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be positive");
  if (n_quad < 4 * n_modes) {
    throw std::invalid_argument("n_quad too small: cubic products alias below 4*n_modes");
  }
  const double pi = std::numbers::pi;
  const int m = n_quad_ - 1;
  weight_ = pi / n_quad_;
  points_.resize(m);
  for (int i = 0; i < m; ++i) points_[i] = pi * (i + 1) / n_quad_;
  const double norm = std::sqrt(2.0 / pi);
  basis_.resize(static_cast<std::size_t>(n_modes_) * m);
  for (int k = 1; k <= n_modes_; ++k) {
    double* row = basis_.data() + static_cast<std::size_t>(k - 1) * m;
    for (int i = 0; i < m; ++i) row[i] = norm * std::sin(k * points_[i]);
  }
}

std::span<const double> Collocation::mode_values(int k) const {
  if (k < 1 || k > n_modes_) throw std::invalid_argument("mode index out of range");
  const int m = n_points();
  return {basis_.data() + static_cast<std::size_t>(k - 1) * m,
          static_cast<std::size_t>(m)};
}

void Collocation::to_grid(const Field& f, std::span<double> values) const {
  const int m = n_points();
  if (static_cast<int>(f.size()) != n_modes_ ||
      static_cast<int>(values.size()) != m) {
    throw std::invalid_argument("collocation size mismatch");
  }
  for (int i = 0; i < m; ++i) values[i] = 0.0;
  for (int k = 0; k < n_modes_; ++k) {
    const double c = f[k];
    if (c == 0.0) continue;
    const double* row = basis_.data() + static_cast<std::size_t>(k) * m;
    for (int i = 0; i < m; ++i) values[i] += c * row[i];
  }
}

Field Collocation::to_coeffs(std::span<const double> values) const {
  const int m = n_points();
  if (static_cast<int>(values.size()) != m) {
    throw std::invalid_argument("collocation size mismatch");
  }
  Field f(n_modes_);
  for (int k = 0; k < n_modes_; ++k) {
    const double* row = basis_.data() + static_cast<std::size_t>(k) * m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += values[i] * row[i];
    f[k] = acc * weight_;
  }
  return f;
}

double Collocation::integrate(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != n_points()) {
    throw std::invalid_argument("collocation size mismatch");
  }
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * weight_;
}

double h_alpha_norm(const Field& f, const SpectralBasis& basis, double alpha) {
  check_same_length(f, basis);
  if (!f.all_finite()) throw std::domain_error("h_alpha_norm: non-finite field");
  double acc = 0.0;
  for (int k = 0; k < basis.n_modes; ++k) {
    const double w = std::pow(basis.eigenvalues[k] + 1.0, 2.0 * alpha);
    acc += f[k] * f[k] * w;
  }
  return std::sqrt(acc);
}

Field project_c(const Field& f, const SpectralBasis& basis) {
  check_same_length(f, basis);
  Field out(basis.n_modes);
  for (int k = 0; k < basis.kernel_dim; ++k) out[k] = f[k];
  return out;
}

Field project_s(const Field& f, const SpectralBasis& basis) {
  check_same_length(f, basis);
  Field out(basis.n_modes);
  for (int k = basis.kernel_dim; k < basis.n_modes; ++k) out[k] = f[k];
  return out;
}

Field semigroup_apply(const Field& f, const SpectralBasis& basis, double t) {
  check_same_length(f, basis);
  if (t < 0.0) throw std::domain_error("semigroup_apply: t must be nonnegative");
  Field out(basis.n_modes);
  for (int k = 0; k < basis.n_modes; ++k) {
    out[k] = std::exp(-basis.eigenvalues[k] * t) * f[k];
  }
  return out;
}

double tensor_inverse_weight(int k, int j, const SpectralBasis& basis) {
  if (k < 1 || j < 1 || k > basis.n_modes || j > basis.n_modes) {
    throw std::invalid_argument("tensor_inverse_weight: mode index out of range");
  }
  if (k <= basis.kernel_dim && j <= basis.kernel_dim) return 0.0;
  const double sum = basis.eigenvalues[k - 1] + basis.eigenvalues[j - 1];
  if (sum == 0.0) {
    throw std::domain_error("tensor_inverse_weight: singular eigenvalue pair");
  }
  return -2.0 / sum;
}

}  // namespace ampeq
