#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "gsgf/config.hpp"
#include "gsgf/io.hpp"
#include "gsgf/stepper.hpp"
#include "support.hpp"

using namespace gsgf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  REQUIRE(os);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

const char* kMinimalConfig =
    "dim = 2\n"
    "n = 16\n"
    "r = 3\n"
    "mu0 = 1\n"
    "mu1 = 1\n"
    "alpha1 = 0.25\n"
    "t_end = 1\n"
    "ic = taylor_green\n";

}  // namespace

TEST_CASE("config defaults and full parse") {
  RunConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.dim == 2);
  CHECK(cfg.n == 16);
  CHECK(cfg.params.law.mu0 == 1.0);
  CHECK(cfg.params.law.mu1 == 1.0);
  CHECK(cfg.params.law.r == 3.0);
  CHECK(cfg.params.alpha1 == 0.25);
  CHECK(cfg.params.t_end == 1.0);
  CHECK(cfg.params.ic.kind == ICKind::taylor_green);
  CHECK(cfg.params.scheme == Scheme::rk4);
  CHECK(cfg.params.forcing.kind == ForcingKind::none);
  CHECK(cfg.params.seed == 0);
  CHECK(cfg.dt_auto);
  CHECK(cfg.output_dir == ".");
  CHECK(cfg.snapshot_every == 0);
  CHECK(cfg.records_file == "records.csv");
  CHECK(cfg.warnings.empty());

  const std::string full =
      "# full example\n"
      "dim = 3\n"
      "n = 24\n"
      "r = 4.5   # exponent\n"
      "mu0 = 2\n"
      "mu1 = 0.5\n"
      "alpha1 = 0\n"
      "dt = 0.002\n"
      "t_end = 0.5\n"
      "scheme = imex\n"
      "ic = random_band(1, 4, 0.8)\n"
      "forcing = steady_mode(1, 0, 2, 0.3)\n"
      "seed = 77\n"
      "output_dir = out\n"
      "snapshot_every = 100\n"
      "records_file = series.csv\n";
  RunConfig fc = parse_config(full);
  CHECK(fc.dim == 3);
  CHECK(fc.n == 24);
  CHECK(fc.params.law.r == 4.5);
  CHECK_FALSE(fc.dt_auto);
  CHECK(fc.params.dt == 0.002);
  CHECK(fc.params.scheme == Scheme::imex);
  CHECK(fc.params.ic.kind == ICKind::random_band);
  CHECK(fc.params.ic.kmin == 1);
  CHECK(fc.params.ic.kmax == 4);
  CHECK(fc.params.ic.amplitude == 0.8);
  CHECK(fc.params.forcing.kind == ForcingKind::steady_mode);
  CHECK(fc.params.forcing.mode[0] == 1);
  CHECK(fc.params.forcing.mode[1] == 0);
  CHECK(fc.params.forcing.mode[2] == 2);
  CHECK(fc.params.forcing.amplitude == 0.3);
  CHECK(fc.params.seed == 77);
  CHECK(fc.output_dir == "out");
  CHECK(fc.snapshot_every == 100);
  CHECK(fc.records_file == "series.csv");

  RunConfig da = parse_config(std::string(kMinimalConfig) + "dt = auto\n");
  CHECK(da.dt_auto);
}

TEST_CASE("config missing keys are reported together") {
  try {
    parse_config("");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("missing required keys") != std::string::npos);
    for (const char* k : {"dim", "n", "r", "mu0", "mu1", "alpha1", "t_end", "ic"})
      CHECK(msg.find(k) != std::string::npos);
  }

  try {
    parse_config("dim = 2\nn = 16\nr = 3\nmu0 = 1\nmu1 = 1\nalpha1 = 0\nt_end = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ic") != std::string::npos);
    CHECK(msg.find("dim") == std::string::npos);
  }
}

TEST_CASE("config structural errors carry line numbers") {
  try {
    parse_config(std::string(kMinimalConfig) + "bogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 9") != std::string::npos);
    CHECK(msg.find("unknown key 'bogus_key'") != std::string::npos);
  }

  try {
    parse_config(std::string(kMinimalConfig) + "n = 32\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("duplicate key 'n'") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "seed =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "seed = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "dt = fast\n"), ConfigError);
}

TEST_CASE("config constraint violations") {
  auto with = [](const std::string& key, const std::string& value) {
    std::string out;
    for (const char* lineText : {"dim = 2", "n = 16", "r = 3", "mu0 = 1", "mu1 = 1",
                                 "alpha1 = 0.25", "t_end = 1", "ic = taylor_green"}) {
      std::string l(lineText);
      if (l.substr(0, key.size()) == key && l[key.size()] == ' ') l = key + " = " + value;
      out += l + "\n";
    }
    return out;
  };
  CHECK_THROWS_AS(parse_config(with("dim", "4")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("n", "7")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("n", "6")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("r", "1.5")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("mu0", "0")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("mu1", "-1")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("alpha1", "-0.1")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("t_end", "0")), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "dt = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "scheme = euler\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimalConfig) + "snapshot_every = -1\n"), ConfigError);

  RunConfig warned = parse_config(with("r", "2.5"));
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.warnings[0].find("outside theorem regime") != std::string::npos);
}

TEST_CASE("config descriptor grammar") {
  auto base = [](const std::string& ic) {
    return "dim = 2\nn = 16\nr = 3\nmu0 = 1\nmu1 = 1\nalpha1 = 0\nt_end = 1\nic = " + ic + "\n";
  };
  RunConfig amp = parse_config(base("taylor_green(2.5)"));
  CHECK(amp.params.ic.amplitude == 2.5);
  RunConfig sh = parse_config(base("shear"));
  CHECK(sh.params.ic.kind == ICKind::shear);
  RunConfig fl = parse_config(base("file(state.bin)"));
  CHECK(fl.params.ic.kind == ICKind::file);
  CHECK(fl.params.ic.path == "state.bin");

  CHECK_THROWS_AS(parse_config(base("taylor_green(1, 2)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("taylor_green(-1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("shear(1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("random_band(1, 3)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("random_band(0, 3, 1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("random_band(4, 3, 1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("random_band(1, 3, 1")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("vortex_sheet")), ConfigError);
  CHECK_THROWS_AS(parse_config(base("file()")), ConfigError);

  // steady_mode arity follows the dimension
  CHECK_THROWS_AS(parse_config(base("taylor_green") + "forcing = steady_mode(1, 2, 0, 0.5)\n"),
                  ConfigError);
  RunConfig ok2 = parse_config(base("taylor_green") + "forcing = steady_mode(1, 2, 0.5)\n");
  CHECK(ok2.params.forcing.mode[0] == 1);
  CHECK(ok2.params.forcing.mode[1] == 2);
  CHECK(ok2.params.forcing.amplitude == 0.5);
  CHECK_THROWS_AS(parse_config(base("taylor_green") + "forcing = nudge\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base("taylor_green") + "forcing = manufactured(1)\n"), ConfigError);
}

TEST_CASE("snapshot roundtrip is bit exact") {
  Grid g(2, 8);
  SimParams p;
  p.ic.kind = ICKind::random_band;
  p.ic.kmax = 2;
  p.seed = 61;
  SimState s = make_initial_state(g, p);
  s.t = 0.37;
  const ConstitutiveLaw law = make_law(2.0, 0.5, 3.5);
  const std::string path = "io_test_snapshot.bin";
  write_snapshot(s, law, 0.25, path);

  SnapshotHeader h;
  SimState back = read_snapshot(path, g, &h);
  CHECK(h.dim == 2);
  CHECK(h.n == 8);
  CHECK(h.t == 0.37);
  CHECK(h.alpha1 == 0.25);
  CHECK(h.mu0 == 2.0);
  CHECK(h.mu1 == 0.5);
  CHECK(h.r == 3.5);
  CHECK(back.t == s.t);
  for (int i = 0; i < 2; ++i)
    for (std::size_t m = 0; m < g.size(); ++m) {
      CHECK(back.u[i][m].real() == s.u[i][m].real());
      CHECK(back.u[i][m].imag() == s.u[i][m].imag());
    }
  std::remove(path.c_str());
}

TEST_CASE("snapshot error paths") {
  Grid g(2, 8);
  SimParams p;
  p.ic.kind = ICKind::taylor_green;
  SimState s = make_initial_state(g, p);
  const std::string path = "io_test_badsnap.bin";

  spit(path, "JUNKDATA");
  CHECK_THROWS_WITH(read_snapshot(path, g), Catch::Matchers::ContainsSubstring("magic mismatch"));

  // right magic, unsupported version
  std::string vbytes = "GSGF";
  const std::uint32_t v2 = 2;
  vbytes.append(reinterpret_cast<const char*>(&v2), 4);
  spit(path, vbytes);
  CHECK_THROWS_WITH(read_snapshot(path, g), Catch::Matchers::ContainsSubstring("version mismatch"));

  write_snapshot(s, make_law(1.0, 1.0, 3.0), 0.0, path);
  const std::string whole = slurp(path);
  spit(path, whole.substr(0, 300));
  CHECK_THROWS_WITH(read_snapshot(path, g), Catch::Matchers::ContainsSubstring("truncated"));
  spit(path, whole.substr(0, 10));
  CHECK_THROWS_WITH(read_snapshot(path, g), Catch::Matchers::ContainsSubstring("truncated"));

  spit(path, whole);
  Grid g16(2, 16);
  CHECK_THROWS_WITH(read_snapshot(path, g16), Catch::Matchers::ContainsSubstring("dimension mismatch"));
  Grid g3(3, 8);
  CHECK_THROWS_WITH(read_snapshot(path, g3), Catch::Matchers::ContainsSubstring("dimension mismatch"));

  CHECK_THROWS_AS(read_snapshot("io_test_missing.bin", g), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("records format and parse roundtrip") {
  CHECK(format_records({}) == std::string(kRecordsHeader) + "\n");

  std::vector<EnergyRecord> series(3);
  series[0].t = 0.0;
  series[0].E = 1.0 / 3.0;
  series[0].dissipation = 0.1;
  series[0].id_res = {1e-17, 2.5e-13, 0.0};
  series[1].t = 1e-3;
  series[1].E = 6.02214076e23;
  series[1].forcing_power = -4.9e-324;  // denormal survives the roundtrip
  series[1].w1r = 123456.789012345;
  series[2].t = 2e-3;
  series[2].energy_residual = -7.25;
  series[2].Ir = 3.0;

  const std::string text = format_records(series);
  std::vector<EnergyRecord> back = parse_records(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].t == series[i].t);
    CHECK(back[i].E == series[i].E);
    CHECK(back[i].dissipation == series[i].dissipation);
    CHECK(back[i].forcing_power == series[i].forcing_power);
    CHECK(back[i].l2 == series[i].l2);
    CHECK(back[i].h1 == series[i].h1);
    CHECK(back[i].h2 == series[i].h2);
    CHECK(back[i].w1r == series[i].w1r);
    CHECK(back[i].Ir == series[i].Ir);
    CHECK(back[i].energy_residual == series[i].energy_residual);
    CHECK(back[i].id_res == series[i].id_res);
  }

  const std::string path = "io_test_records.csv";
  write_records(series, path);
  CHECK(slurp(path) == text);
  std::vector<EnergyRecord> fromdisk = read_records(path);
  REQUIRE(fromdisk.size() == 3);
  CHECK(fromdisk[1].E == series[1].E);
  std::remove(path.c_str());
}

TEST_CASE("records rejects malformed text") {
  CHECK_THROWS_WITH(parse_records("time,E\n0,1\n"),
                    Catch::Matchers::ContainsSubstring("header mismatch"));
  const std::string header(kRecordsHeader);
  CHECK_THROWS_WITH(parse_records(header + "\n1,2,3\n"),
                    Catch::Matchers::ContainsSubstring("malformed"));
  CHECK_THROWS_WITH(parse_records(header + "\n0,0,0,0,0,0,0,0,0,0,0,0,0,9\n"),
                    Catch::Matchers::ContainsSubstring("trailing data"));
  CHECK_THROWS_WITH(parse_records(header + "\n0,0,0,0,0,0,0,0,0,0,0,0,x\n"),
                    Catch::Matchers::ContainsSubstring("malformed"));
  // blank trailing lines are tolerated
  CHECK(parse_records(header + "\n\n").empty());
}
