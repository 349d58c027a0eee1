#pragma once

// Shared test fixtures: seeded field generators and relative-error helpers.

#include <cmath>
#include <cstdint>
#include <random>

#include "gsgf/field_ops.hpp"
#include "gsgf/stepper.hpp"

namespace testsup {

// Solenoidal band-limited field with unit-normal mode draws, normalized to
// the requested L2 norm.
inline gsgf::SpectralVectorField divfree_field(const gsgf::Grid& g, int kmin, int kmax, double amp,
                                               std::uint64_t seed) {
  return gsgf::detail::random_band_field(g, kmin, kmax, amp, seed);
}

// Conjugate-symmetric zero-mean field with no solenoidality constraint;
// the negative control for identities that need div u = 0.
inline gsgf::SpectralVectorField nonsolenoidal_field(const gsgf::Grid& g, int kmax, std::uint64_t seed) {
  const int d = g.dim();
  const int half = g.n() / 2;
  gsgf::SpectralVectorField u(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const std::size_t neg = g.negated_index(m);
    if (neg < m) continue;
    const auto iax = g.decompose(m);
    long kk = 0;
    bool nyq = false;
    for (int a = 0; a < d; ++a) {
      const long ka = g.wavenumber(iax[static_cast<std::size_t>(a)]);
      kk += ka * ka;
      nyq = nyq || (iax[static_cast<std::size_t>(a)] == half);
    }
    if (nyq || kk == 0 || kk > static_cast<long>(kmax) * kmax) continue;
    for (int i = 0; i < d; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      u[i][m] = {re, im};
      u[i][neg] = {re, -im};
    }
  }
  return u;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// ||a - b||_{l2 over modes} / ||b||, absolute when b = 0.
inline double field_rel_diff(const gsgf::SpectralVectorField& a, const gsgf::SpectralVectorField& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (std::size_t m = 0; m < a.grid().size(); ++m) {
      num += std::norm(a[i][m] - b[i][m]);
      den += std::norm(b[i][m]);
    }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double mode_max_diff(const gsgf::ComplexArray& a, const gsgf::ComplexArray& b) {
  double w = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) w = std::max(w, std::abs(a[m] - b[m]));
  return w;
}

inline double mode_max_diff(const gsgf::SpectralVectorField& a, const gsgf::SpectralVectorField& b) {
  double w = 0.0;
  for (int i = 0; i < a.dim(); ++i) w = std::max(w, mode_max_diff(a[i], b[i]));
  return w;
}

}  // namespace testsup
