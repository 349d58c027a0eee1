#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gsgf/diagnostics.hpp"
#include "gsgf/oracle.hpp"
#include "gsgf/stepper.hpp"
#include "gsgf/uniqueness.hpp"
#include "support.hpp"

using namespace gsgf;

namespace {

SpectralVectorField shear_field(const Grid& g, double amplitude) {
  RealArray s(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) s[m] = amplitude * std::sin(g.point(m)[1]);
  SpectralVectorField u(g);
  u[0] = g.forward(s);
  return u;
}

}  // namespace

TEST_CASE("energy closed forms") {
  Grid g(2, 16);
  SpectralVectorField z(g);
  CHECK(energy(z, 0.5) == 0.0);

  SpectralVectorField sh = shear_field(g, 1.0);
  CHECK(testsup::rel_err(energy(sh, 0.1), 1.1 * kPi * kPi) < 1e-13);

  SpectralVectorField tg = oracle::taylor_green_exact(g, 0.0, 1.0, 0.0, 1.5);
  const double A2 = 1.5 * 1.5;
  CHECK(testsup::rel_err(energy(tg, 0.25), kPi * kPi * A2 * 1.5) < 1e-13);
  CHECK(testsup::rel_err(energy(tg, 0.0), kPi * kPi * A2) < 1e-13);

  CHECK_THROWS_AS(energy(sh, -0.1), std::invalid_argument);
}

TEST_CASE("dissipation closed forms") {
  Grid g(2, 16);
  NonlinearWorkspace ws(g);
  SpectralVectorField z(g);
  CHECK(dissipation(z, make_law(1.0, 1.0, 3.0), ws) == 0.0);

  // constant-viscosity limit: Phi = mu0^{r-2} * ||Du||^2 = pi^2
  SpectralVectorField sh = shear_field(g, 1.0);
  CHECK(testsup::rel_err(dissipation(sh, make_law(1.0, 0.0, 3.0), ws), kPi * kPi) < 1e-12);
  CHECK(testsup::rel_err(dissipation(sh, make_law(2.0, 0.0, 3.0), ws), 2.0 * kPi * kPi) < 1e-12);

  // full law: Phi = int |D|^2 + int |D|^3 with |D| = |cos x2|/sqrt(2)
  Grid g32(2, 32);
  NonlinearWorkspace ws32(g32);
  SpectralVectorField sh32 = shear_field(g32, 1.0);
  const double want = kPi * kPi + 4.0 * std::sqrt(2.0) * kPi / 3.0;
  CHECK(testsup::rel_err(dissipation(sh32, make_law(1.0, 1.0, 3.0), ws32), want) < 1e-5);
}

TEST_CASE("instantaneous energy balance") {
  // <momentum_rhs(u, f), u> = -Phi + <f, u>: the projected stress pairing
  // reproduces the padded quadrature of S:D exactly, and the transport
  // terms are energy-neutral.
  for (int dim : {2, 3}) {
    Grid g(dim, 8);
    NonlinearWorkspace ws(g);
    ConstitutiveLaw law = make_law(1.0, 1.0, 4.0);
    const double alpha1 = 0.25;
    SpectralVectorField u = testsup::divfree_field(g, 1, 2, 1.0, 401 + static_cast<unsigned>(dim));
    SimParams p;
    p.law = law;
    p.alpha1 = alpha1;
    p.forcing.kind = ForcingKind::steady_mode;
    p.forcing.mode = {1, 1, 0};
    p.forcing.amplitude = 0.3;
    auto f = make_forcing(g, p, u, ws);
    REQUIRE(f.has_value());
    SpectralVectorField rhs = momentum_rhs(u, &*f, law, alpha1, ws);
    const double lhs = l2_inner(rhs, u);
    const double want = -dissipation(u, law, ws) + forcing_power(*f, u);
    const double scale = std::abs(lhs) + std::abs(want) + 1.0;
    CHECK(std::abs(lhs - want) < 1e-11 * scale);
  }
}

TEST_CASE("coercivity chain on random states") {
  for (double r : {3.0, 4.0, 5.5})
    for (int dim : {2, 3}) {
      Grid g(dim, 8);
      NonlinearWorkspace ws(g);
      ConstitutiveLaw law = make_law(2.0, 0.5, r);
      const DerivedConstants c = derived_constants(law);
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        SpectralVectorField u =
            testsup::divfree_field(g, 1, 2, 2.0, seed + 500 + static_cast<unsigned>(dim));
        auto agg = detail::strain_aggregates(u, law, ws);
        CHECK(agg.dissipation >= c.c3 * agg.i0_weighted - 1e-12 * agg.dissipation);
        CHECK(agg.i0_weighted >= agg.strain_lr - 1e-12 * agg.i0_weighted);
        CHECK(agg.dissipation >= 0.0);
        CHECK(agg.nu_max >= viscosity_factor(law, 0.0));
      }
    }
}

TEST_CASE("energy residual definition") {
  EnergyRecord a;
  EnergyRecord b;
  CHECK(energy_residual(a, b, 0.1) == 0.0);
  a.E = 1.0;
  a.dissipation = 2.0;
  b.E = 0.8;
  b.dissipation = 1.8;
  b.forcing_power = 0.4;
  // (0.8-1.0)/0.1 + 1.9 - 0.2
  CHECK(testsup::rel_err(energy_residual(a, b, 0.1), -2.0 + 1.9 - 0.2) < 1e-14);
}

TEST_CASE("per-step energy defect converges at third order") {
  // The defect over one step, R*dt, shrinks like dt^3 when dt halves
  // (trapezoid quadrature of the dissipation against the exact balance).
  Grid g(2, 16);
  SimParams p;
  p.law = make_law(1.0, 0.0, 3.0);
  p.alpha1 = 0.25;
  p.ic.kind = ICKind::taylor_green;
  p.t_end = 0.2;
  SimState s0 = make_initial_state(g, p);

  auto max_defect = [&](double dt) {
    SimParams q = p;
    q.dt = dt;
    RunResult rr = run(g, q, s0);
    REQUIRE_FALSE(rr.blew_up);
    double worst = 0.0;
    for (std::size_t i = 1; i < rr.records.size(); ++i)
      worst = std::max(worst, std::abs(rr.records[i].energy_residual) * dt);
    return worst;
  };

  const double d1 = max_defect(0.02);
  const double d2 = max_defect(0.01);
  const double d3 = max_defect(0.005);
  const double o1 = std::log2(d1 / d2);
  const double o2 = std::log2(d2 / d3);
  INFO("defect orders " << o1 << " " << o2);
  CHECK(o1 >= 2.7);
  CHECK(o2 >= 2.7);
  CHECK(o1 <= 3.4);
  CHECK(o2 <= 3.4);
}

TEST_CASE("unforced runs dissipate energy monotonically") {
  Grid g(2, 16);
  SimParams p;
  p.law = make_law(1.0, 1.0, 4.0);
  p.alpha1 = 0.25;
  p.ic.kind = ICKind::random_band;
  p.ic.kmax = 4;
  p.seed = 21;
  p.dt = 1e-3;
  p.t_end = 0.05;
  SimState s0 = make_initial_state(g, p);
  RunResult rr = run(g, p, s0);
  REQUIRE_FALSE(rr.blew_up);
  REQUIRE(rr.records.size() == 51);
  const DerivedConstants c = derived_constants(p.law);
  for (std::size_t i = 0; i < rr.records.size(); ++i) {
    const EnergyRecord& rec = rr.records[i];
    CHECK(rec.E >= 0.0);
    CHECK(rec.Ir >= 0.0);
    // coercivity under the integral, every recorded step
    CHECK(rec.dissipation >= c.c3 * rec.coercivity_weighted - 1e-12 * rec.dissipation);
    CHECK(rec.coercivity_weighted >= rec.strain_lr - 1e-12 * rec.coercivity_weighted);
    // 2D: the triple term vanishes for divergence-free fields
    CHECK(std::abs(rec.triple_term) < 1e-10 * std::max(1.0, rec.triple_scale));
    if (i > 0) {
      CHECK(rr.records[i].E <= rr.records[i - 1].E);
      CHECK(rr.records[i].E <= rr.records[i - 1].E + p.dt * std::abs(rr.records[i].energy_residual));
    }
  }
}

TEST_CASE("second order monitor") {
  Grid g(2, 16);
  NonlinearWorkspace ws(g);
  ConstitutiveLaw law = make_law(1.0, 1.0, 3.0);
  SpectralVectorField z(g);
  SecondOrderMonitor mz = second_order_monitor(z, law, 0.25, ws);
  CHECK(mz.h2_sq == 0.0);
  CHECK(mz.Ir == 0.0);
  CHECK(mz.triple_term == 0.0);
  CHECK(mz.cubic_ratio == 0.0);

  // shear: second-derivative weight sin^2(x2)/2 against (1 + |cos x2|/sqrt 2)
  // gives I_r = pi^2 + 2 sqrt(2) pi / 3 at r = 3. The |cos| kink sits where
  // the cofactor is O(1), so the quadrature error decays like m^{-2}; the
  // test pins the rate as well as the value.
  const double want = kPi * kPi + 2.0 * std::sqrt(2.0) * kPi / 3.0;
  double errs[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    Grid gn(2, pass == 0 ? 32 : 64);
    NonlinearWorkspace wsn(gn);
    SpectralVectorField sh = shear_field(gn, 1.0);
    SecondOrderMonitor ms = second_order_monitor(sh, law, 0.25, wsn);
    errs[pass] = testsup::rel_err(ms.Ir, want);
    if (pass == 0) CHECK(testsup::rel_err(ms.h2_sq, 2.0 * kPi * kPi) < 1e-13);
  }
  CHECK(errs[0] < 2e-3);
  CHECK(errs[1] < 5.2e-4);
  CHECK(errs[1] < 0.35 * errs[0]);

  SpectralVectorField u = testsup::divfree_field(g, 1, 4, 1.0, 431);
  SecondOrderMonitor mu = second_order_monitor(u, law, 0.25, ws);
  CHECK(std::abs(mu.triple_term) < 1e-10 * std::max(1.0, mu.triple_scale));
  CHECK(mu.cubic_ratio > 0.0);
  CHECK(std::isfinite(mu.cubic_ratio));

  Grid g3(3, 8);
  NonlinearWorkspace ws3(g3);
  SpectralVectorField u3 = testsup::divfree_field(g3, 1, 2, 1.0, 433);
  SecondOrderMonitor m3 = second_order_monitor(u3, law, 0.25, ws3);
  CHECK(m3.Ir >= 0.0);
  CHECK(std::isfinite(m3.triple_term));
}

TEST_CASE("integration by parts identity residuals") {
  Grid g(2, 8);
  NonlinearWorkspace ws(g);

  SpectralVectorField z(g);
  ComplexArray zf(g.size(), {0.0, 0.0});
  auto rz = identity_checks(z, z, zf, ws);
  CHECK(rz[0] == 0.0);
  CHECK(rz[1] == 0.0);
  CHECK(rz[2] == 0.0);

  for (int dim : {2, 3}) {
    Grid gd(dim, 8);
    NonlinearWorkspace wsd(gd);
    for (std::uint64_t seed : {441u, 442u, 443u}) {
      SpectralVectorField u = testsup::divfree_field(gd, 1, 2, 1.0, seed);
      SpectralVectorField v = helmholtz_apply(u, 0.25);
      SpectralVectorField other = testsup::divfree_field(gd, 1, 2, 1.0, seed + 7);
      auto res = identity_checks(u, v, other[0], wsd);
      CHECK(res[0] < 1e-11);
      CHECK(res[1] < 1e-11);
      CHECK(res[2] < 1e-11);
    }
  }

  // negative control: a field with O(1) divergence breaks all three
  SpectralVectorField bad = testsup::nonsolenoidal_field(g, 2, 451);
  SpectralVectorField vb = helmholtz_apply(bad, 0.25);
  SpectralVectorField probe = testsup::divfree_field(g, 1, 2, 1.0, 452);
  auto rb = identity_checks(bad, vb, probe[0], ws);
  CHECK(rb[0] > 1e-3);
  CHECK(rb[1] > 1e-3);
  CHECK(rb[2] > 1e-3);
}

TEST_CASE("record assembly") {
  Grid g(2, 16);
  NonlinearWorkspace ws(g);
  ConstitutiveLaw law = make_law(1.0, 0.0, 3.0);
  SpectralVectorField tg = oracle::taylor_green_exact(g, 0.0, 1.0, 0.25, 1.0);
  EnergyRecord rec = make_record(tg, 0.75, law, 0.25, nullptr, ws);
  CHECK(rec.t == 0.75);
  CHECK(testsup::rel_err(rec.E, kPi * kPi * 1.5) < 1e-12);
  CHECK(testsup::rel_err(rec.l2 * rec.l2, 2.0 * kPi * kPi) < 1e-12);
  CHECK(testsup::rel_err(rec.h1 * rec.h1, 4.0 * kPi * kPi) < 1e-12);
  CHECK(testsup::rel_err(rec.dissipation, 2.0 * kPi * kPi) < 1e-12);
  CHECK(rec.forcing_power == 0.0);
  CHECK(rec.id_res[0] < 1e-11);
  CHECK(rec.id_res[1] < 1e-11);
  CHECK(rec.id_res[2] < 1e-11);
  CHECK(rec.energy_residual == 0.0);
}

TEST_CASE("separation of identical twins is exactly zero") {
  Grid g(2, 8);
  SimParams p;
  p.law = make_law(1.0, 1.0, 4.0);
  p.alpha1 = 0.25;
  p.ic.kind = ICKind::random_band;
  p.ic.kmax = 2;
  p.seed = 31;
  p.dt = 5e-3;
  p.t_end = 0.1;
  UniquenessResult res = uniqueness_experiment(g, p, 0.0);
  CHECK(res.identical);
  CHECK(res.w0 == 0.0);
  for (const auto& s : res.series) CHECK(s.W == 0.0);
  CHECK(res.max_log_ratio == 0.0);
}

TEST_CASE("linear-law twin decay matches the closed form") {
  // Both trajectories are exact decaying vortices when the perturbation is
  // vortex-shaped, so W(t)/W(0) = exp(-2 sigma t).
  Grid g(2, 16);
  SimParams p;
  p.law = make_law(1.0, 0.0, 3.0);
  p.alpha1 = 0.25;
  p.ic.kind = ICKind::taylor_green;
  p.dt = 2e-3;
  p.t_end = 1.0;
  SpectralVectorField dir = oracle::taylor_green_exact(g, 0.0, 1.0, 0.25, 1.0);
  UniquenessResult res = uniqueness_experiment(g, p, 1e-6, &dir);
  REQUIRE(res.w0 > 0.0);
  const double sigma = 2.0 / 3.0;
  double worst = 0.0;
  for (const auto& s : res.series) {
    const double want = std::exp(-2.0 * sigma * s.t);
    worst = std::max(worst, std::abs(s.W / res.w0 - want) / want);
  }
  INFO("worst relative deviation " << worst);
  CHECK(worst < 1e-3);
}

TEST_CASE("twin-delta consistency and growth envelope") {
  Grid g(2, 16);
  SimParams p;
  p.law = make_law(1.0, 1.0, 4.0);
  p.alpha1 = 0.25;
  p.ic.kind = ICKind::random_band;
  p.ic.kmax = 4;
  p.seed = 2024;
  p.dt = 1e-3;
  p.t_end = 0.25;

  UniquenessResult a = uniqueness_experiment(g, p, 1e-6);
  UniquenessResult b = uniqueness_experiment(g, p, 5e-7);
  REQUIRE(a.w0 > 0.0);
  REQUIRE(b.w0 > 0.0);
  const double ra = std::sqrt(a.series.back().W);
  const double rb = std::sqrt(b.series.back().W);
  CHECK(std::isfinite(ra));
  CHECK(std::isfinite(rb));
  CHECK(std::abs(ra / rb - 2.0) < 0.02);

  // the calibrated envelope holds along the whole trajectory
  CHECK(a.max_log_ratio <= kGronwallCalibrated);
  CHECK(b.max_log_ratio <= kGronwallCalibrated);
}
