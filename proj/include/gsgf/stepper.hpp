#pragma once

// Time integration of the filtered momentum equation in mode space, with
// the simulation parameter bundle, initial-condition and forcing builders,
// a CFL heuristic, and the record-producing driver loop.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsgf/common.hpp"
#include "gsgf/constitutive.hpp"
#include "gsgf/diagnostics.hpp"
#include "gsgf/field.hpp"
#include "gsgf/field_ops.hpp"
#include "gsgf/grid.hpp"
#include "gsgf/nonlinear.hpp"

namespace gsgf {

enum class Scheme { rk4, imex };

enum class ICKind { taylor_green, shear, random_band, file };

struct ICSpec {
  ICKind kind = ICKind::taylor_green;
  double amplitude = 1.0;
  int kmin = 1;         // random_band shell bounds, inclusive
  int kmax = 2;
  std::string path;     // file kind only
};

enum class ForcingKind { none, steady_mode, manufactured };

struct ForcingSpec {
  ForcingKind kind = ForcingKind::none;
  std::array<int, 3> mode{1, 0, 0};
  double amplitude = 0.0;
};

struct SimParams {
  ConstitutiveLaw law = make_law(1.0, 1.0, 3.0);
  double alpha1 = 0.0;
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  ICSpec ic;
  ForcingSpec forcing;
  std::uint64_t seed = 0;
  // false drops the stress from the dynamics, leaving the energy-neutral
  // transport part; used by tests that isolate dissipation.
  bool stress_enabled = true;
};

struct SimState {
  double t = 0.0;
  SpectralVectorField u;
};

// Raised when a step produces non-finite modes or magnitudes past the
// explosion threshold; the driver converts it into a reported outcome.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBlowUpThreshold = 1e12;

inline void check_state(const SpectralVectorField& u, double t) {
  if (!all_finite(u) || max_mode_magnitude(u) > kBlowUpThreshold)
    throw BlowUpError("blow-up or unstable dt near t = " + std::to_string(t));
}

// Repairs a candidate initial field into an admissible state: conjugate
// symmetry enforced pairwise, Nyquist planes cleared, zero mean,
// divergence-free. Already-admissible fields pass through bit-identically
// except for the Leray correction of roundoff-level divergence.
inline void project_initial(SpectralVectorField& u) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const int half = g.n() / 2;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const std::size_t neg = g.negated_index(m);
    const auto k = g.decompose(m);
    bool nyq = false;
    for (int a = 0; a < d; ++a) nyq = nyq || (k[static_cast<std::size_t>(a)] == half);
    for (int i = 0; i < d; ++i) {
      if (nyq) {
        u[i][m] = 0.0;
        continue;
      }
      if (neg == m) {
        u[i][m] = std::complex<double>(u[i][m].real(), 0.0);
      } else if (neg > m) {
        const std::complex<double> z = 0.5 * (u[i][m] + std::conj(u[i][neg]));
        u[i][m] = z;
        u[i][neg] = std::conj(z);
      }
    }
  }
  remove_mean(u);
  leray_project(u);
}

namespace detail {

// Deterministic band-limited solenoidal field: independent unit normals on
// the real and imaginary parts of every component over the half-lattice
// shell kmin <= |k| <= kmax, visited in ascending flat index, then
// projected and rescaled to the requested norm.
inline SpectralVectorField random_band_field(const Grid& g, int kmin, int kmax, double amplitude,
                                             std::uint64_t seed) {
  if (kmin < 1 || kmax < kmin) throw std::invalid_argument("random_band: need 1 <= kmin <= kmax");
  const int d = g.dim();
  const int half = g.n() / 2;
  SpectralVectorField u(g);
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
    if (nyq || kk < static_cast<long>(kmin) * kmin || kk > static_cast<long>(kmax) * kmax) continue;
    for (int i = 0; i < d; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      u[i][m] = {re, im};
      u[i][neg] = {re, -im};
    }
  }
  remove_mean(u);
  leray_project(u);
  const double norm = std::sqrt(l2_norm_sq(u));
  if (!(norm > 0.0))
    throw std::invalid_argument("random_band: shell holds no resolvable wavenumbers");
  scale(u, amplitude / norm);
  return u;
}

}  // namespace detail

// Builds the state at t = 0 for the named initial condition. file-backed
// states are deserialized by the front end and passed to run directly.
inline SimState make_initial_state(const Grid& g, const SimParams& p) {
  const int d = g.dim();
  const ICSpec& ic = p.ic;
  SimState s;
  s.t = 0.0;
  switch (ic.kind) {
    case ICKind::taylor_green: {
      if (!(ic.amplitude > 0.0)) throw std::invalid_argument("taylor_green: amplitude must be positive");
      std::array<RealArray, 3> phys;
      for (int i = 0; i < d; ++i) phys[static_cast<std::size_t>(i)].assign(g.size(), 0.0);
      for (std::size_t m = 0; m < g.size(); ++m) {
        const auto x = g.point(m);
        phys[0][m] = ic.amplitude * std::sin(x[0]) * std::cos(x[1]);
        phys[1][m] = -ic.amplitude * std::cos(x[0]) * std::sin(x[1]);
      }
      SpectralVectorField u(g);
      for (int i = 0; i < d; ++i) u[i] = g.forward(phys[static_cast<std::size_t>(i)]);
      project_initial(u);
      s.u = std::move(u);
      return s;
    }
    case ICKind::shear: {
      if (!(ic.amplitude > 0.0)) throw std::invalid_argument("shear: amplitude must be positive");
      RealArray phys(g.size(), 0.0);
      for (std::size_t m = 0; m < g.size(); ++m) phys[m] = ic.amplitude * std::sin(g.point(m)[1]);
      SpectralVectorField u(g);
      u[0] = g.forward(phys);
      project_initial(u);
      s.u = std::move(u);
      return s;
    }
    case ICKind::random_band: {
      if (!(ic.amplitude > 0.0)) throw std::invalid_argument("random_band: amplitude must be positive");
      s.u = detail::random_band_field(g, ic.kmin, ic.kmax, ic.amplitude, p.seed);
      return s;
    }
    case ICKind::file:
      throw std::invalid_argument("file initial conditions are resolved by the caller");
  }
  throw std::logic_error("unreachable ic kind");
}

// Builds the (time-independent) forcing, or nullopt when unforced.
// steady_mode places amplitude/2 on the +-k pair of the component axis
// with the smallest |k_a| (so the cosine is maximally transverse), then
// projects. manufactured reproduces the nonlinearity of u0 so that u0 is
// an exact steady state of the forced equation.
inline std::optional<SpectralVectorField> make_forcing(const Grid& g, const SimParams& p,
                                                       const SpectralVectorField& u0,
                                                       const NonlinearWorkspace& ws) {
  const int d = g.dim();
  switch (p.forcing.kind) {
    case ForcingKind::none:
      return std::nullopt;
    case ForcingKind::steady_mode: {
      std::array<int, 3> k{0, 0, 0};
      bool all_zero = true;
      for (int a = 0; a < d; ++a) {
        k[static_cast<std::size_t>(a)] = p.forcing.mode[static_cast<std::size_t>(a)];
        all_zero = all_zero && k[static_cast<std::size_t>(a)] == 0;
        if (std::abs(k[static_cast<std::size_t>(a)]) >= g.n() / 2)
          throw std::invalid_argument("steady_mode: wavenumber outside the resolved lattice");
      }
      if (all_zero) throw std::invalid_argument("steady_mode: zero wavenumber has no direction");
      int axis = 0;
      for (int a = 1; a < d; ++a)
        if (std::abs(k[static_cast<std::size_t>(a)]) < std::abs(k[static_cast<std::size_t>(axis)])) axis = a;
      SpectralVectorField f(g);
      std::array<int, 3> kneg{-k[0], -k[1], -k[2]};
      f[axis][g.mode_index(k)] = 0.5 * p.forcing.amplitude;
      f[axis][g.mode_index(kneg)] = 0.5 * p.forcing.amplitude;
      leray_project(f);
      remove_mean(f);
      return f;
    }
    case ForcingKind::manufactured: {
      SpectralVectorField v = helmholtz_apply(u0, p.alpha1);
      SpectralVectorField f = convect(u0, v, ws);
      add_scaled(f, 1.0, stretch(u0, v, ws));
      if (p.stress_enabled) add_scaled(f, -1.0, stress_divergence(u0, p.law, ws));
      return f;
    }
  }
  throw std::logic_error("unreachable forcing kind");
}

// du/dt recovered from the filtered momentum balance.
inline SpectralVectorField time_derivative(const SpectralVectorField& u, const SpectralVectorField* f,
                                           const SimParams& p, const NonlinearWorkspace& ws) {
  return helmholtz_solve(momentum_rhs(u, f, p.law, p.alpha1, ws, p.stress_enabled), p.alpha1);
}

// Classical four-stage explicit step on the mode coefficients.
inline SimState step_rk4(const SimState& s, const SpectralVectorField* f, const SimParams& p,
                         const NonlinearWorkspace& ws) {
  const double dt = p.dt;
  SpectralVectorField k1 = time_derivative(s.u, f, p, ws);
  SpectralVectorField k2 = time_derivative(scaled_sum(s.u, 0.5 * dt, k1), f, p, ws);
  SpectralVectorField k3 = time_derivative(scaled_sum(s.u, 0.5 * dt, k2), f, p, ws);
  SpectralVectorField k4 = time_derivative(scaled_sum(s.u, dt, k3), f, p, ws);
  SpectralVectorField un = s.u;
  add_scaled(un, dt / 6.0, k1);
  add_scaled(un, dt / 3.0, k2);
  add_scaled(un, dt / 3.0, k3);
  add_scaled(un, dt / 6.0, k4);
  leray_project(un);
  remove_mean(un);
  SimState out{s.t + dt, std::move(un)};
  check_state(out.u, out.t);
  return out;
}

// First-order splitting: the constant-coefficient core of the stress,
// div(nu0 Du) with nu0 = phi(0), is folded into a diagonal implicit solve;
// transport and the state-dependent stress excess stay explicit. Each mode
// obeys (H + dt nu0 |k|^2 / 2) u' = H u + dt N, H = 1 + alpha1 |k|^2.
inline SimState step_imex(const SimState& s, const SpectralVectorField* f, const SimParams& p,
                          const NonlinearWorkspace& ws) {
  const Grid& g = s.u.grid();
  const int d = g.dim();
  const double dt = p.dt;
  SpectralVectorField v = helmholtz_apply(s.u, p.alpha1);
  SpectralVectorField nl(g);
  if (p.stress_enabled) nl = stress_divergence(s.u, p.law, ws, /*excess_only=*/true);
  add_scaled(nl, -1.0, convect(s.u, v, ws));
  add_scaled(nl, -1.0, stretch(s.u, v, ws));
  if (f != nullptr) add_scaled(nl, 1.0, *f);
  leray_project(nl);
  remove_mean(nl);
  const double nu0 = p.stress_enabled ? viscosity_factor(p.law, 0.0) : 0.0;
  const auto& k2 = g.stokes_eigenvalues();
  SpectralVectorField un(g);
  for (int i = 0; i < d; ++i)
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double h = 1.0 + p.alpha1 * k2[m];
      un[i][m] = (h * s.u[i][m] + dt * nl[i][m]) / (h + 0.5 * dt * nu0 * k2[m]);
    }
  leray_project(un);
  remove_mean(un);
  SimState out{s.t + dt, std::move(un)};
  check_state(out.u, out.t);
  return out;
}

inline SimState step(const SimState& s, const SpectralVectorField* f, const SimParams& p,
                     const NonlinearWorkspace& ws) {
  return p.scheme == Scheme::rk4 ? step_rk4(s, f, p, ws) : step_imex(s, f, p, ws);
}

// Advective and diffusive step-size limits with a 0.4 safety factor. The
// diffusive limit credits the (1 + alpha1 |k|^2) filter that divides the
// stiff term, using the largest resolvable eigenvalue and the largest
// pointwise viscosity factor of the current state.
inline double cfl_dt(const SpectralVectorField& u, const SimParams& p, const NonlinearWorkspace& ws) {
  const Grid& g = u.grid();
  const int d = g.dim();
  std::array<RealArray, 3> phys;
  for (int i = 0; i < d; ++i) phys[static_cast<std::size_t>(i)] = g.inverse(u[i]);
  double umax = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    double s2 = 0.0;
    for (int i = 0; i < d; ++i) s2 += phys[static_cast<std::size_t>(i)][m] * phys[static_cast<std::size_t>(i)][m];
    umax = std::max(umax, s2);
  }
  umax = std::sqrt(umax);
  const double dx = g.dx();
  const double adv = umax > 1e-14 ? dx / umax : std::numeric_limits<double>::infinity();
  const double half = static_cast<double>(g.n()) / 2.0;
  const double k2max = static_cast<double>(d) * half * half;
  const double nu_max = std::max(detail::strain_aggregates(u, p.law, ws).nu_max, 1e-14);
  const double diff = dx * dx * 2.0 * (1.0 + p.alpha1 * k2max) / nu_max;
  return 0.4 * std::min(adv, diff);
}

struct RunResult {
  SimState final_state;
  std::vector<EnergyRecord> records;
  std::vector<SimState> snapshots;
  std::vector<long> snapshot_steps;
  bool blew_up = false;
  std::string blow_up_message;
  bool t_end_rounded = false;  // t_end was not an integer multiple of dt
};

// Integrates from the given state to t_end, producing one record per step
// (the first row describes the initial state) and optional periodic
// snapshots. The time coordinate accumulates t += dt so a run resumed from
// a snapshot reproduces the original step times bit for bit. Blow-up ends
// the run early with the partial series preserved.
inline RunResult run(const Grid& g, const SimParams& p, const SimState& initial,
                     long snapshot_every = 0) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  const double span = p.t_end - initial.t;
  if (!(span > 0.0)) throw std::invalid_argument("run: t_end must exceed the starting time");
  const long steps = static_cast<long>(std::ceil(span / p.dt - 1e-9));
  NonlinearWorkspace ws(g);
  std::optional<SpectralVectorField> f = make_forcing(g, p, initial.u, ws);
  const SpectralVectorField* f_ptr = f ? &*f : nullptr;

  RunResult out;
  out.t_end_rounded =
      std::abs(initial.t + static_cast<double>(steps) * p.dt - p.t_end) > 1e-9 * std::max(1.0, std::abs(p.t_end));
  out.records.reserve(static_cast<std::size_t>(steps) + 1);
  SimState s;
  s.t = initial.t;
  s.u = initial.u;
  out.records.push_back(make_record(s.u, s.t, p.law, p.alpha1, f_ptr, ws));
  for (long n = 1; n <= steps; ++n) {
    try {
      s = step(s, f_ptr, p, ws);
    } catch (const BlowUpError& e) {
      out.blew_up = true;
      out.blow_up_message = e.what();
      break;
    }
    EnergyRecord rec = make_record(s.u, s.t, p.law, p.alpha1, f_ptr, ws);
    rec.energy_residual = energy_residual(out.records.back(), rec, p.dt);
    out.records.push_back(rec);
    if (snapshot_every > 0 && n % snapshot_every == 0) {
      out.snapshots.push_back(SimState{s.t, s.u});
      out.snapshot_steps.push_back(n);
    }
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace gsgf
