#pragma once

// Quadratic nonlinearities and the stress divergence, evaluated
// pseudo-spectrally on a 3/2-rule padded grid and truncated back.
//
// Padding removes aliasing exactly for quadratic products. The stress is
// not polynomial in the strain for general r, so its pointwise evaluation
// also happens on the padded grid; the residual aliasing this leaves is
// quantified by a dedicated test rather than hidden.

#include <cmath>
#include <stdexcept>

#include "gsgf/common.hpp"
#include "gsgf/constitutive.hpp"
#include "gsgf/field.hpp"
#include "gsgf/field_ops.hpp"
#include "gsgf/grid.hpp"

namespace gsgf {

// Smallest even m >= 3n/2.
inline int padded_extent(int n) {
  int m = (3 * n + 1) / 2;
  if (m % 2 != 0) ++m;
  return m;
}

class NonlinearWorkspace {
 public:
  explicit NonlinearWorkspace(const Grid& base)
      : base_(&base), padded_(base.dim(), padded_extent(base.n())) {
    embed_.resize(base.size());
    nyquist_axes_.resize(base.size());
    for (std::size_t idx = 0; idx < base.size(); ++idx) {
      auto iax = base.decompose(idx);
      std::array<int, 3> k{0, 0, 0};
      int nyq = 0;
      for (int a = 0; a < base.dim(); ++a) {
        k[a] = base.wavenumber(iax[a]);
        if (k[a] == base.n() / 2) ++nyq;
      }
      embed_[idx] = padded_.mode_index(k);
      nyquist_axes_[idx] = static_cast<std::uint8_t>(nyq);
    }
  }

  NonlinearWorkspace(const NonlinearWorkspace&) = delete;
  NonlinearWorkspace& operator=(const NonlinearWorkspace&) = delete;

  const Grid& base() const { return *base_; }
  const Grid& padded() const { return padded_; }

  // Zero-pad base modes onto the padded lattice. A base Nyquist-plane
  // coefficient is self-conjugate on the base lattice but sits at a
  // two-sided position on the padded one; it is split evenly over the
  // +-n/2 images (the cosine interpretation) to keep the result
  // conjugate-symmetric.
  ComplexArray embed(const ComplexArray& base_modes) const {
    if (base_modes.size() != base_->size()) throw std::invalid_argument("embed: wrong field length");
    ComplexArray out(padded_.size(), {0.0, 0.0});
    for (std::size_t idx = 0; idx < base_->size(); ++idx) {
      const int nyq = nyquist_axes_[idx];
      if (nyq == 0) {
        out[embed_[idx]] = base_modes[idx];
        continue;
      }
      auto iax = base_->decompose(idx);
      std::array<int, 3> k{0, 0, 0};
      for (int a = 0; a < base_->dim(); ++a) k[a] = base_->wavenumber(iax[a]);
      const std::complex<double> v = base_modes[idx] / static_cast<double>(1 << nyq);
      for (int c = 0; c < (1 << nyq); ++c) {
        std::array<int, 3> kk = k;
        int bit = 0;
        for (int a = 0; a < base_->dim(); ++a) {
          if (k[a] == base_->n() / 2) {
            if ((c >> bit) & 1) kk[a] = -k[a];
            ++bit;
          }
        }
        out[padded_.mode_index(kk)] += v;
      }
    }
    return out;
  }

  // Orthogonal truncation of padded modes onto the base lattice. Base
  // Nyquist planes are zeroed: with m = 3n/2 exactly, alias images of
  // quadratic-product content can land on |k_a| = n/2 (and only there),
  // and the derivative operator carries no Nyquist content anyway.
  ComplexArray truncate(const ComplexArray& padded_modes) const {
    if (padded_modes.size() != padded_.size()) throw std::invalid_argument("truncate: wrong field length");
    ComplexArray out(base_->size(), {0.0, 0.0});
    for (std::size_t idx = 0; idx < base_->size(); ++idx)
      out[idx] = (nyquist_axes_[idx] == 0) ? padded_modes[embed_[idx]] : 0.0;
    return out;
  }

  RealArray padded_physical(const ComplexArray& base_modes) const { return padded_.inverse(embed(base_modes)); }

  // Forward-transform padded samples and truncate to base modes.
  ComplexArray truncated_modes(const RealArray& padded_phys) const { return truncate(padded_.forward(padded_phys)); }

  // Alias-free mode-space product of two base fields.
  ComplexArray product_modes(const ComplexArray& a, const ComplexArray& b) const {
    RealArray pa = padded_physical(a);
    RealArray pb = padded_physical(b);
    for (std::size_t m = 0; m < pa.size(); ++m) pa[m] *= pb[m];
    return truncated_modes(pa);
  }

 private:
  const Grid* base_;
  Grid padded_;
  std::vector<std::size_t> embed_;
  std::vector<std::uint8_t> nyquist_axes_;
};

namespace detail {

// (u.grad)v with no divergence check; identity diagnostics call this on
// deliberately non-solenoidal fields.
inline SpectralVectorField advect_raw(const SpectralVectorField& u, const SpectralVectorField& v,
                                      const NonlinearWorkspace& ws) {
  const Grid& g = u.grid();
  require_same_layout(g, v.grid(), "advect");
  require_same_layout(g, ws.base(), "advect");
  const int d = g.dim();
  std::array<RealArray, 3> uphys;
  for (int j = 0; j < d; ++j) uphys[static_cast<std::size_t>(j)] = ws.padded_physical(u[j]);
  SpectralVectorField out(g);
  RealArray acc(ws.padded().size());
  for (int i = 0; i < d; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      RealArray dv = ws.padded_physical(spectral_derivative(g, v[i], j));
      const RealArray& uj = uphys[static_cast<std::size_t>(j)];
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += uj[m] * dv[m];
    }
    out[i] = ws.truncated_modes(acc);
  }
  return out;
}

}  // namespace detail

// Convective term (u.grad)v, component i = sum_j u_j d_j v_i.
inline SpectralVectorField convect(const SpectralVectorField& u, const SpectralVectorField& v,
                                   const NonlinearWorkspace& ws) {
  if (max_divergence(u) > 1e-10 * mode_l2(u))
    throw std::invalid_argument("convect: transporting field is not divergence-free");
  return detail::advect_raw(u, v, ws);
}

// Stretching term, component i = sum_j v_j d_i u_j.
inline SpectralVectorField stretch(const SpectralVectorField& u, const SpectralVectorField& v,
                                   const NonlinearWorkspace& ws) {
  const Grid& g = u.grid();
  require_same_layout(g, v.grid(), "stretch");
  require_same_layout(g, ws.base(), "stretch");
  const int d = g.dim();
  std::array<RealArray, 3> vphys;
  for (int j = 0; j < d; ++j) vphys[static_cast<std::size_t>(j)] = ws.padded_physical(v[j]);
  SpectralVectorField out(g);
  RealArray acc(ws.padded().size());
  for (int i = 0; i < d; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      RealArray du = ws.padded_physical(spectral_derivative(g, u[j], i));
      const RealArray& vj = vphys[static_cast<std::size_t>(j)];
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += vj[m] * du[m];
    }
    out[i] = ws.truncated_modes(acc);
  }
  return out;
}

// Strain tensor Du at the padded collocation points.
inline PhysicalTensorField padded_strain(const SpectralVectorField& u, const NonlinearWorkspace& ws) {
  const Grid& g = u.grid();
  require_same_layout(g, ws.base(), "padded_strain");
  const int d = g.dim();
  PhysicalTensorField D(ws.padded());
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      ComplexArray sij = spectral_derivative(g, u[i], j);
      ComplexArray sji = spectral_derivative(g, u[j], i);
      for (std::size_t m = 0; m < g.size(); ++m) sij[m] = 0.5 * (sij[m] + sji[m]);
      D(i, j) = ws.padded().inverse(ws.embed(sij));
      if (j != i) D(j, i) = D(i, j);
    }
  }
  return D;
}

// div S(Du), assembled as pointwise stress on the padded grid followed by
// a spectral divergence. excess_only drops the constant mu0^{r-2} part of
// the viscosity factor (used by the implicit/explicit splitting).
inline SpectralVectorField stress_divergence(const SpectralVectorField& u, const ConstitutiveLaw& law,
                                             const NonlinearWorkspace& ws, bool excess_only = false) {
  const Grid& g = u.grid();
  const int d = g.dim();
  PhysicalTensorField D = padded_strain(u, ws);
  const std::size_t np = ws.padded().size();
  RealArray phi(np, 0.0);
  for (std::size_t m = 0; m < np; ++m) {
    double s2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s2 += D(i, j)[m] * D(i, j)[m];
    const double s = std::sqrt(s2);
    phi[m] = excess_only ? viscosity_factor_excess(law, s) : viscosity_factor(law, s);
  }
  SpectralTensorField S(g);
  RealArray buf(np);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      for (std::size_t m = 0; m < np; ++m) buf[m] = phi[m] * D(i, j)[m];
      S(i, j) = ws.truncated_modes(buf);
      if (j != i) S(j, i) = S(i, j);
    }
  }
  return divergence_tensor(S);
}

// Right-hand side of dv/dt = P[f - (u.grad)v - sum_j v_j grad u_j + div S(Du)],
// v = (I - alpha1 Laplace) u. Divergence-free and zero-mean on return.
// include_stress = false drops div S, leaving the conservative transport
// dynamics (used to isolate the stress contribution in experiments).
inline SpectralVectorField momentum_rhs(const SpectralVectorField& u, const SpectralVectorField* f,
                                        const ConstitutiveLaw& law, double alpha1,
                                        const NonlinearWorkspace& ws, bool include_stress = true) {
  SpectralVectorField v = helmholtz_apply(u, alpha1);
  SpectralVectorField rhs(u.grid());
  if (include_stress) rhs = stress_divergence(u, law, ws);
  add_scaled(rhs, -1.0, convect(u, v, ws));
  add_scaled(rhs, -1.0, stretch(u, v, ws));
  if (f != nullptr) add_scaled(rhs, 1.0, *f);
  leray_project(rhs);
  remove_mean(rhs);
  return rhs;
}

// Relative disagreement between the direct nonlinearity convect+stretch
// and its expanded multi-chain form
//   sum_j u_j d_j u_i
//   - alpha1 sum_jk d_j d_k (u_j d_k u_i) + alpha1 sum_jk d_j (d_k u_j d_k u_i)
//   + (1/2) d_i (|u|^2 + alpha1 |grad u|^2) - alpha1 sum_jk d_k (d_k u_j d_i u_j),
// every product alias-free. Both assemblies are dealiased and projected
// before comparison so the analytically-equal gradient pieces cannot
// reintroduce Nyquist-plane disagreement.
inline double expansion_consistency(const SpectralVectorField& u, double alpha1,
                                    const NonlinearWorkspace& ws) {
  const Grid& g = u.grid();
  const int d = g.dim();
  SpectralVectorField v = helmholtz_apply(u, alpha1);

  SpectralVectorField direct = convect(u, v, ws);
  add_scaled(direct, 1.0, stretch(u, v, ws));

  // grad(i,k) = d_k u_i in mode space
  SpectralTensorField grad = gradient(u);

  SpectralVectorField expanded(g);
  for (int i = 0; i < d; ++i) {
    ComplexArray acc(g.size(), {0.0, 0.0});
    for (int j = 0; j < d; ++j) {
      ComplexArray p = ws.product_modes(u[j], grad(i, j));
      for (std::size_t m = 0; m < g.size(); ++m) acc[m] += p[m];
      for (int k = 0; k < d; ++k) {
        p = ws.product_modes(u[j], grad(i, k));
        p = spectral_derivative(g, spectral_derivative(g, p, j), k);
        for (std::size_t m = 0; m < g.size(); ++m) acc[m] -= alpha1 * p[m];

        p = ws.product_modes(grad(j, k), grad(i, k));
        p = spectral_derivative(g, p, j);
        for (std::size_t m = 0; m < g.size(); ++m) acc[m] += alpha1 * p[m];

        p = ws.product_modes(grad(j, k), grad(j, i));
        p = spectral_derivative(g, p, k);
        for (std::size_t m = 0; m < g.size(); ++m) acc[m] -= alpha1 * p[m];
      }
    }
    expanded[i] = std::move(acc);
  }
  // (1/2) d_i (sum_j |u_j|^2 + alpha1 sum_jk |d_k u_j|^2)
  ComplexArray scalar(g.size(), {0.0, 0.0});
  for (int j = 0; j < d; ++j) {
    ComplexArray p = ws.product_modes(u[j], u[j]);
    for (std::size_t m = 0; m < g.size(); ++m) scalar[m] += p[m];
    for (int k = 0; k < d; ++k) {
      p = ws.product_modes(grad(j, k), grad(j, k));
      for (std::size_t m = 0; m < g.size(); ++m) scalar[m] += alpha1 * p[m];
    }
  }
  for (int i = 0; i < d; ++i) {
    ComplexArray p = spectral_derivative(g, scalar, i);
    for (std::size_t m = 0; m < g.size(); ++m) expanded[i][m] += 0.5 * p[m];
  }

  apply_dealias(direct);
  apply_dealias(expanded);
  leray_project(direct);
  leray_project(expanded);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < d; ++i) {
    for (std::size_t m = 0; m < g.size(); ++m) {
      num += std::norm(direct[i][m] - expanded[i][m]);
      den += std::norm(direct[i][m]);
    }
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace gsgf
