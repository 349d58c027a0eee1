#pragma once

// Brute-force reference implementations for validating the spectral
// pipeline on tiny grids, plus the closed-form decaying-vortex solution.
// Deliberately shares no machinery with the main pipeline: derivatives go
// through a dense differentiation matrix, integrals through a direct
// rectangle-rule sum, products through an O(n^{2d}) mode-pair double sum.

#include <array>
#include <cmath>
#include <stdexcept>

#include "gsgf/common.hpp"
#include "gsgf/field.hpp"
#include "gsgf/grid.hpp"

namespace gsgf::oracle {

namespace detail {

inline int oracle_wavenumber(int i, int n) { return (i <= n / 2) ? i : i - n; }

inline void require_small(int n) {
  if (n > 16) throw std::invalid_argument("oracle: grid too large (n <= 16)");
}

// flat index helpers on an n^d lattice, axis 0 slowest
inline std::array<int, 3> oracle_decompose(std::size_t idx, int dim, int n) {
  std::array<int, 3> iax{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    iax[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
    idx /= static_cast<std::size_t>(n);
  }
  return iax;
}

inline std::size_t oracle_flatten(const std::array<int, 3>& iax, int dim, int n) {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(iax[a]);
  return idx;
}

}  // namespace detail

// Truncated convolution (fg)_hat(k) = sum_{p+q=k} f_hat(p) g_hat(q) by
// direct double sum over all mode pairs, keeping only in-lattice k.
inline ComplexArray oracle_convolution(const ComplexArray& f, const ComplexArray& g, int dim, int n) {
  detail::require_small(n);
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
  if (f.size() != size || g.size() != size) throw std::invalid_argument("oracle_convolution: wrong length");
  ComplexArray out(size, {0.0, 0.0});
  for (std::size_t p = 0; p < size; ++p) {
    if (f[p] == std::complex<double>(0.0, 0.0)) continue;
    auto ip = detail::oracle_decompose(p, dim, n);
    for (std::size_t q = 0; q < size; ++q) {
      auto iq = detail::oracle_decompose(q, dim, n);
      std::array<int, 3> ik{0, 0, 0};
      bool inside = true;
      for (int a = 0; a < dim; ++a) {
        int k = detail::oracle_wavenumber(ip[a], n) + detail::oracle_wavenumber(iq[a], n);
        if (k < -n / 2 + 1 || k > n / 2) {
          inside = false;
          break;
        }
        ik[a] = (k >= 0) ? k : k + n;
      }
      if (!inside) continue;
      out[detail::oracle_flatten(ik, dim, n)] += f[p] * g[q];
    }
  }
  return out;
}

// Rectangle rule: sum of samples times cell volume (2*pi/n)^d.
inline double oracle_quadrature(const RealArray& field, int dim, int n) {
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
  if (field.size() != size) throw std::invalid_argument("oracle_quadrature: wrong length");
  double cell = 1.0;
  for (int a = 0; a < dim; ++a) cell *= kTwoPi / static_cast<double>(n);
  double s = 0.0;
  for (double v : field) s += v;
  return s * cell;
}

// Dense periodic Fourier differentiation matrix, built entrywise from the
// mode sum M(a,b) = (1/n) sum_k ik e^{ik(x_a - x_b)} with the Nyquist mode
// dropped (its derivative contribution is zero for real data).
inline std::vector<double> oracle_diff_matrix(int n) {
  std::vector<double> M(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  const double h = kTwoPi / static_cast<double>(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      // (1/n) sum_k ik e^{ik h (a-b)} = (1/n) sum_k (-k) sin(k h (a-b))
      double s = 0.0;
      for (int k = -n / 2 + 1; k < n / 2; ++k)
        s += -static_cast<double>(k) * std::sin(static_cast<double>(k) * h * static_cast<double>(a - b));
      M[static_cast<std::size_t>(a * n + b)] = s / static_cast<double>(n);
    }
  }
  return M;
}

// Apply the dense differentiation matrix along one axis.
inline RealArray oracle_derivative(const RealArray& field, int axis, int dim, int n) {
  detail::require_small(n);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("oracle_derivative: bad axis");
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
  if (field.size() != size) throw std::invalid_argument("oracle_derivative: wrong length");
  std::vector<double> M = oracle_diff_matrix(n);
  RealArray out(size, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    auto iax = detail::oracle_decompose(idx, dim, n);
    double s = 0.0;
    for (int b = 0; b < n; ++b) {
      auto jax = iax;
      jax[axis] = b;
      s += M[static_cast<std::size_t>(iax[axis] * n + b)] * field[detail::oracle_flatten(jax, dim, n)];
    }
    out[idx] = s;
  }
  return out;
}

// Decaying 2D vortex, an exact solution for the constant-viscosity law:
//   u(t) = A e^{-sigma t} (sin x1 cos x2, -cos x1 sin x2),
//   sigma = mu_eff / (1 + 2 alpha1).
// Both quadratic terms are gradients for this profile and project away,
// Laplace u = -2u, and (I - alpha1 Laplace) u = (1 + 2 alpha1) u.
// Modes are populated analytically; no transform is involved.
inline double taylor_green_rate(double mu_eff, double alpha1) { return mu_eff / (1.0 + 2.0 * alpha1); }

inline SpectralVectorField taylor_green_exact(const Grid& g, double t, double mu_eff, double alpha1,
                                              double amplitude) {
  if (g.dim() != 2) throw std::invalid_argument("taylor_green_exact: 2D only");
  const double amp = amplitude * std::exp(-taylor_green_rate(mu_eff, alpha1) * t);
  SpectralVectorField u(g);
  const std::complex<double> iq(0.0, 0.25 * amp);
  // sin x1 cos x2 = (1/2)[sin(x1+x2) + sin(x1-x2)], sin modes are -i/2 at +k
  u[0][g.mode_index({1, 1, 0})] = -iq;
  u[0][g.mode_index({-1, -1, 0})] = iq;
  u[0][g.mode_index({1, -1, 0})] = -iq;
  u[0][g.mode_index({-1, 1, 0})] = iq;
  // -cos x1 sin x2 = -(1/2)[sin(x1+x2) - sin(x1-x2)]
  u[1][g.mode_index({1, 1, 0})] = iq;
  u[1][g.mode_index({-1, -1, 0})] = -iq;
  u[1][g.mode_index({1, -1, 0})] = -iq;
  u[1][g.mode_index({-1, 1, 0})] = iq;
  return u;
}

}  // namespace gsgf::oracle
