// Command-line front end.
//
//   gsgf run <config>                  integrate and write records/snapshots
//   gsgf verify-constitutive <config>  margin sweep report for the configured law
//   gsgf uniqueness <config> --delta <d>  twin-run separation experiment
//   gsgf check <config>                brute-force oracle cross-check at small n
//
// Exit codes: 0 success, 1 validation or verification failure, 2 blow-up.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gsgf/config.hpp"
#include "gsgf/io.hpp"
#include "gsgf/oracle.hpp"
#include "gsgf/uniqueness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

void print_warnings(const gsgf::RunConfig& cfg) {
  for (const auto& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

// Builds grid + initial state, resolving file-backed initial conditions
// and the automatic step size.
struct Prepared {
  gsgf::Grid grid;
  gsgf::SimParams params;
  gsgf::SimState initial;
};

Prepared prepare(gsgf::RunConfig& cfg) {
  Prepared p{gsgf::make_grid(cfg.dim, cfg.n), cfg.params, {}};
  if (cfg.params.ic.kind == gsgf::ICKind::file) {
    gsgf::SnapshotHeader h;
    p.initial = gsgf::read_snapshot(cfg.params.ic.path, p.grid, &h);
    std::fprintf(stderr, "restart: %s at t = %.17g\n", cfg.params.ic.path.c_str(), h.t);
  } else {
    p.initial = gsgf::make_initial_state(p.grid, p.params);
  }
  if (cfg.dt_auto) {
    gsgf::NonlinearWorkspace ws(p.grid);
    p.params.dt = gsgf::cfl_dt(p.initial.u, p.params, ws);
    std::fprintf(stderr, "dt = %.17g (auto)\n", p.params.dt);
  }
  return p;
}

int cmd_run(gsgf::RunConfig& cfg) {
  Prepared p = prepare(cfg);
  gsgf::RunResult res = gsgf::run(p.grid, p.params, p.initial, cfg.snapshot_every);
  if (res.t_end_rounded)
    std::fprintf(stderr, "warning: t_end is not a multiple of dt; integrated to t = %.17g\n",
                 res.final_state.t);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string records_path = cfg.output_dir + "/" + cfg.records_file;
  gsgf::write_records(res.records, records_path);
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06ld.bin", res.snapshot_steps[i]);
    gsgf::write_snapshot(res.snapshots[i], p.params.law, p.params.alpha1,
                         cfg.output_dir + "/" + name);
  }
  std::printf("steps = %zu\n", res.records.size() - 1);
  std::printf("records = %s\n", records_path.c_str());
  if (!res.records.empty()) {
    const gsgf::EnergyRecord& last = res.records.back();
    std::printf("final: t = %.17g  E = %.17g  dissipation = %.17g\n", last.t, last.E, last.dissipation);
  }
  if (res.blew_up) {
    std::fprintf(stderr, "error: %s\n", res.blow_up_message.c_str());
    return 2;
  }
  return 0;
}

int cmd_verify_constitutive(const gsgf::RunConfig& cfg) {
  const gsgf::ConstitutiveLaw& law = cfg.params.law;
  const int dim = cfg.dim;
  std::mt19937_64 rng(cfg.params.seed);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  const int trials = 20000;
  double worst[5] = {0.0, 0.0, 0.0, 0.0, 0.0};  // margin / scale, most negative
  const char* names[5] = {"coercivity", "growth", "monotonicity", "jacobian_lower", "jacobian_upper"};
  for (int t = 0; t < trials; ++t) {
    gsgf::Tensor2 a = gsgf::zero_tensor(dim);
    gsgf::Tensor2 b = gsgf::zero_tensor(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const double va = entry(rng);
        a(i, j) = va;
        a(j, i) = va;
        const double vb = entry(rng);
        b(i, j) = vb;
        b(j, i) = vb;
      }
    const gsgf::Margin marg[3] = {gsgf::coercivity_margin(a, law), gsgf::growth_margin(a, law),
                                  gsgf::monotonicity_margin(a, b, law)};
    for (int m = 0; m < 3; ++m)
      worst[m] = std::min(worst[m], marg[m].value / std::max(marg[m].scale, 1e-300));
    const auto jb = gsgf::jacobian_form_bounds(a, b, law);
    worst[3] = std::min(worst[3], jb.first.value / std::max(jb.first.scale, 1e-300));
    worst[4] = std::min(worst[4], jb.second.value / std::max(jb.second.scale, 1e-300));
  }
  bool ok = true;
  for (int m = 0; m < 5; ++m) {
    const bool pass = worst[m] >= -1e-12;
    ok = ok && pass;
    std::printf("%-14s worst margin/scale = % .3e  [%s]\n", names[m], worst[m], pass ? "ok" : "FAIL");
  }
  std::printf("law: mu0 = %g, mu1 = %g, r = %g, dim = %d, trials = %d\n", law.mu0, law.mu1, law.r, dim,
              trials);
  return ok ? 0 : 1;
}

int cmd_uniqueness(gsgf::RunConfig& cfg, double delta) {
  Prepared p = prepare(cfg);
  if (cfg.params.ic.kind == gsgf::ICKind::file) {
    std::fprintf(stderr, "error: uniqueness needs a generative initial condition, not a file\n");
    return 1;
  }
  gsgf::UniquenessResult res = gsgf::uniqueness_experiment(p.grid, p.params, delta);
  const gsgf::UniquenessSample& last = res.series.back();
  std::printf("delta = %.17g\n", delta);
  std::printf("W(0) = %.17g  W(T) = %.17g  int F = %.17g\n", res.w0, last.W, last.intF);
  if (delta == 0.0) {
    std::printf("trajectories byte-identical: %s\n", res.identical ? "yes" : "NO");
    return res.identical ? 0 : 1;
  }
  const bool ok = res.max_log_ratio <= gsgf::kGronwallCalibrated;
  std::printf("max (log W(t) - log W(0)) / int F = %.6f  (envelope %.6f)  [%s]\n", res.max_log_ratio,
              gsgf::kGronwallCalibrated, ok ? "ok" : "FAIL");
  return ok ? 0 : 1;
}

// Cross-checks the transform-based operators against the dense mode-sum
// oracles on an 8^dim lattice with seeded band fields.
int cmd_check(const gsgf::RunConfig& cfg) {
  const int dim = cfg.dim;
  gsgf::Grid g = gsgf::make_grid(dim, 8);
  gsgf::NonlinearWorkspace ws(g);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    gsgf::SpectralVectorField u = gsgf::detail::random_band_field(g, 1, 2, 1.0, cfg.params.seed + s);
    gsgf::SpectralVectorField v = gsgf::detail::random_band_field(g, 1, 2, 1.0, cfg.params.seed + 100 + s);
    const double uscale = gsgf::mode_l2(u);

    gsgf::SpectralVectorField conv = gsgf::convect(u, v, ws);
    for (int i = 0; i < dim; ++i) {
      gsgf::ComplexArray ref(g.size(), {0.0, 0.0});
      for (int j = 0; j < dim; ++j) {
        gsgf::ComplexArray dv = gsgf::spectral_derivative(g, v[i], j);
        gsgf::ComplexArray prod = gsgf::oracle::oracle_convolution(u[j], dv, dim, g.n());
        for (std::size_t m = 0; m < g.size(); ++m) ref[m] += prod[m];
      }
      for (std::size_t m = 0; m < g.size(); ++m)
        worst = std::max(worst, std::abs(conv[i][m] - ref[m]) / uscale);
    }

    for (int axis = 0; axis < dim; ++axis) {
      gsgf::RealArray da = g.inverse(gsgf::spectral_derivative(g, u[0], axis));
      gsgf::RealArray db = gsgf::oracle::oracle_derivative(g.inverse(u[0]), axis, dim, g.n());
      for (std::size_t m = 0; m < g.size(); ++m) worst = std::max(worst, std::abs(da[m] - db[m]) / uscale);
    }
  }
  const bool ok = worst < 1e-11;
  std::printf("oracle cross-check at n = 8, dim = %d: worst relative deviation = %.3e  [%s]\n", dim,
              worst, ok ? "ok" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() < 2) {
    std::fprintf(stderr,
                 "usage: gsgf run <config> | verify-constitutive <config> | "
                 "uniqueness <config> --delta <d> | check <config>\n");
    return 1;
  }
  const std::string& cmd = args[0];
  try {
    gsgf::RunConfig cfg = gsgf::parse_config(read_file(args[1]));
    print_warnings(cfg);
    if (cmd == "run") return cmd_run(cfg);
    if (cmd == "verify-constitutive") return cmd_verify_constitutive(cfg);
    if (cmd == "uniqueness") {
      double delta = -1.0;
      bool have = false;
      for (std::size_t i = 2; i + 1 < args.size(); ++i)
        if (args[i] == "--delta") {
          delta = std::stod(args[i + 1]);
          have = true;
        }
      if (!have || delta < 0.0) {
        std::fprintf(stderr, "error: uniqueness needs --delta <nonnegative value>\n");
        return 1;
      }
      return cmd_uniqueness(cfg, delta);
    }
    if (cmd == "check") return cmd_check(cfg);
    std::fprintf(stderr, "error: unknown subcommand '%s'\n", cmd.c_str());
    return 1;
  } catch (const gsgf::BlowUpError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
