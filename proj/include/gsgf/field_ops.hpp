#pragma once

// Linear mode-space operators: differentiation, symmetric gradient,
// Leray projection, Helmholtz solves, Sobolev norms.
//
// All derivatives act by the ik multiplier with the Nyquist plane zeroed,
// so every operator here maps conjugate-symmetric data to
// conjugate-symmetric data.

#include <cmath>
#include <stdexcept>

#include "gsgf/common.hpp"
#include "gsgf/field.hpp"
#include "gsgf/grid.hpp"

namespace gsgf {

// d/dx_axis in mode space.
inline ComplexArray spectral_derivative(const Grid& g, const ComplexArray& f, int axis) {
  if (f.size() != g.size()) throw std::invalid_argument("spectral_derivative: wrong field length");
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("spectral_derivative: bad axis");
  ComplexArray out(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    auto iax = g.decompose(m);
    double k = g.deriv_symbol(iax[static_cast<std::size_t>(axis)]);
    out[m] = std::complex<double>(0.0, k) * f[m];
  }
  return out;
}

// grad(u): entry (i,j) = d_j u_i.
inline SpectralTensorField gradient(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  SpectralTensorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) out(i, j) = spectral_derivative(g, u[i], j);
  return out;
}

// Symmetric part of grad(u) in mode space.
inline SpectralTensorField strain_spectral(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  SpectralTensorField grad = gradient(u);
  SpectralTensorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j)
      for (std::size_t m = 0; m < g.size(); ++m) out(i, j)[m] = 0.5 * (grad(i, j)[m] + grad(j, i)[m]);
  return out;
}

// Du = (grad u + grad u^T)/2 at collocation points.
inline PhysicalTensorField strain(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  SpectralTensorField s = strain_spectral(u);
  PhysicalTensorField out(g);
  for (int i = 0; i < g.dim(); ++i) {
    out(i, i) = g.inverse(s(i, i));
    for (int j = i + 1; j < g.dim(); ++j) {
      out(i, j) = g.inverse(s(i, j));
      out(j, i) = out(i, j);
    }
  }
  return out;
}

// Row divergence: out_i = sum_j d_j T_ij.
inline SpectralVectorField divergence_tensor(const SpectralTensorField& T) {
  const Grid& g = T.grid();
  SpectralVectorField out(g);
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = 0; j < g.dim(); ++j) {
      ComplexArray d = spectral_derivative(g, T(i, j), j);
      for (std::size_t m = 0; m < g.size(); ++m) out[i][m] += d[m];
    }
  }
  return out;
}

inline ComplexArray divergence(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  ComplexArray out(g.size(), {0.0, 0.0});
  for (int j = 0; j < g.dim(); ++j) {
    ComplexArray d = spectral_derivative(g, u[j], j);
    for (std::size_t m = 0; m < g.size(); ++m) out[m] += d[m];
  }
  return out;
}

// max_k |k . u_hat(k)|, the mode-space divergence residual.
inline double max_divergence(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  double worst = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    auto iax = g.decompose(m);
    std::complex<double> dot = 0.0;
    for (int a = 0; a < g.dim(); ++a) dot += g.deriv_symbol(iax[static_cast<std::size_t>(a)]) * u[a][m];
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

// Mode-space l2 magnitude sqrt(sum |u_hat|^2); used to scale tolerance checks.
inline double mode_l2(const SpectralVectorField& u) {
  double s = 0.0;
  for (int i = 0; i < u.dim(); ++i)
    for (std::size_t m = 0; m < u.grid().size(); ++m) s += std::norm(u[i][m]);
  return std::sqrt(s);
}

// Projection onto divergence-free fields, mode by mode:
// u_hat -> u_hat - k (k . u_hat)/|k|^2. The k = 0 mode is untouched.
// Uses the zeroed-Nyquist multiplier so projected fields satisfy the same
// discrete divergence the derivative operator measures.
inline void leray_project(SpectralVectorField& u) {
  const Grid& g = u.grid();
  for (std::size_t m = 0; m < g.size(); ++m) {
    auto iax = g.decompose(m);
    double k[3] = {0.0, 0.0, 0.0};
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      k[a] = g.deriv_symbol(iax[static_cast<std::size_t>(a)]);
      k2 += k[a] * k[a];
    }
    if (k2 == 0.0) continue;
    std::complex<double> dot = 0.0;
    for (int a = 0; a < g.dim(); ++a) dot += k[a] * u[a][m];
    dot /= k2;
    for (int a = 0; a < g.dim(); ++a) u[a][m] -= k[a] * dot;
  }
}

inline SpectralVectorField leray_projected(SpectralVectorField u) {
  leray_project(u);
  return u;
}

inline void remove_mean(SpectralVectorField& u) {
  for (int i = 0; i < u.dim(); ++i) u[i][0] = 0.0;
}

// Solve (I - alpha1 Laplace) u = v: divide by 1 + alpha1 |k|^2.
inline SpectralVectorField helmholtz_solve(const SpectralVectorField& v, double alpha1) {
  if (alpha1 < 0.0) throw std::invalid_argument("helmholtz_solve: alpha1 must be nonnegative");
  const Grid& g = v.grid();
  const auto& k2 = g.stokes_eigenvalues();
  SpectralVectorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (std::size_t m = 0; m < g.size(); ++m) out[i][m] = v[i][m] / (1.0 + alpha1 * k2[m]);
  return out;
}

// Apply (I - alpha1 Laplace): multiply by 1 + alpha1 |k|^2.
inline SpectralVectorField helmholtz_apply(const SpectralVectorField& u, double alpha1) {
  if (alpha1 < 0.0) throw std::invalid_argument("helmholtz_apply: alpha1 must be nonnegative");
  const Grid& g = u.grid();
  const auto& k2 = g.stokes_eigenvalues();
  SpectralVectorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (std::size_t m = 0; m < g.size(); ++m) out[i][m] = (1.0 + alpha1 * k2[m]) * u[i][m];
  return out;
}

// L2 inner product of real fields by Parseval: (2*pi)^d sum conj(a).b,
// summed in fixed flat order for run-to-run reproducibility.
inline double l2_inner(const Grid& g, const ComplexArray& a, const ComplexArray& b) {
  if (a.size() != g.size() || b.size() != g.size()) throw std::invalid_argument("l2_inner: wrong field length");
  double s = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m)
    s += a[m].real() * b[m].real() + a[m].imag() * b[m].imag();
  return g.volume() * s;
}

inline double l2_inner(const SpectralVectorField& a, const SpectralVectorField& b) {
  require_same_layout(a.grid(), b.grid(), "l2_inner");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (std::size_t m = 0; m < a.grid().size(); ++m)
      s += a[i][m].real() * b[i][m].real() + a[i][m].imag() * b[i][m].imag();
  return a.grid().volume() * s;
}

inline double l2_norm_sq(const SpectralVectorField& u) { return l2_inner(u, u); }

struct SobolevNorms {
  double l2;   // ||u||_{L^2}
  double h1;   // ||grad u||_{L^2}
  double h2;   // ||Laplace u||_{L^2}-equivalent: (sum |k|^4 |u_hat|^2)^{1/2}, volume-scaled
  double w1r;  // ||grad u||_{L^r}, collocation quadrature
};

// Mode-sum seminorms plus the L^r gradient norm by rectangle quadrature
// (exact for trigonometric polynomials only at r = 2; elsewhere it is the
// collocation approximation and is stated as such).
inline SobolevNorms sobolev_norms(const SpectralVectorField& u, double r) {
  if (r < 2.0) throw std::invalid_argument("sobolev_norms: r must be >= 2");
  const Grid& g = u.grid();
  const auto& k2 = g.stokes_eigenvalues();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    for (std::size_t m = 0; m < g.size(); ++m) {
      double a2 = std::norm(u[i][m]);
      s0 += a2;
      s1 += k2[m] * a2;
      s2 += k2[m] * k2[m] * a2;
    }
  }
  const double vol = g.volume();

  // |grad u|_F^r pointwise on the dealiased field, then rectangle rule.
  SpectralTensorField grad = gradient(u);
  RealArray g2(g.size(), 0.0);
  RealArray buf;
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = 0; j < g.dim(); ++j) {
      apply_dealias(g, grad(i, j));
      buf = g.inverse(grad(i, j));
      for (std::size_t m = 0; m < g.size(); ++m) g2[m] += buf[m] * buf[m];
    }
  }
  double sr = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) sr += std::pow(g2[m], 0.5 * r);
  const double cell = vol / static_cast<double>(g.size());

  SobolevNorms out;
  out.l2 = std::sqrt(vol * s0);
  out.h1 = std::sqrt(vol * s1);
  out.h2 = std::sqrt(vol * s2);
  out.w1r = std::pow(sr * cell, 1.0 / r);
  return out;
}

}  // namespace gsgf
