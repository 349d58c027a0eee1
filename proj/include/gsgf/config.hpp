#pragma once

// Plain-text run configuration: one `key = value` per line, `#` comments.
// Unknown and duplicate keys are rejected with their line numbers, missing
// required keys are reported together, and every constraint violation
// names the offending line.

#include <charconv>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsgf/stepper.hpp"

namespace gsgf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim = 2;
  int n = 0;
  SimParams params;
  bool dt_auto = true;
  std::string output_dir = ".";
  long snapshot_every = 0;  // 0 = never
  std::string records_file = "records.csv";
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  double out = 0.0;
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("line " + std::to_string(line) + ": value of '" + key + "' is not a number: " + v);
  return out;
}

inline long parse_long(const std::string& v, int line, const std::string& key) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  long out = 0;
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("line " + std::to_string(line) + ": value of '" + key + "' is not an integer: " + v);
  return out;
}

inline std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  std::uint64_t out = 0;
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("line " + std::to_string(line) + ": value of '" + key +
                      "' is not a nonnegative integer: " + v);
  return out;
}

// name or name(arg1,arg2,...); arguments returned untrimmed of inner
// structure but stripped of surrounding whitespace.
struct Descriptor {
  std::string name;
  std::vector<std::string> args;
};

inline Descriptor parse_descriptor(const std::string& v, int line, const std::string& key) {
  Descriptor d;
  std::size_t open = v.find('(');
  if (open == std::string::npos) {
    d.name = trim(v);
    return d;
  }
  if (v.back() != ')')
    throw ConfigError("line " + std::to_string(line) + ": malformed '" + key + "' descriptor: " + v);
  d.name = trim(v.substr(0, open));
  std::string inner = v.substr(open + 1, v.size() - open - 2);
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = inner.find(',', pos);
    if (comma == std::string::npos) {
      d.args.push_back(trim(inner.substr(pos)));
      break;
    }
    d.args.push_back(trim(inner.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (d.args.size() == 1 && d.args[0].empty()) d.args.clear();
  return d;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  static const std::vector<std::string> known = {
      "dim",     "n",       "r",          "mu0",        "mu1",
      "alpha1",  "dt",      "t_end",      "scheme",     "ic",
      "forcing", "seed",    "output_dir", "snapshot_every", "records_file"};
  static const std::vector<std::string> required = {"dim", "n", "r", "mu0", "mu1", "alpha1", "t_end", "ic"};

  std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    std::size_t eq = raw.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got: " + raw);
    std::string key = detail::trim(raw.substr(0, eq));
    std::string value = detail::trim(raw.substr(eq + 1));
    bool ok = false;
    for (const auto& k : known) ok = ok || (k == key);
    if (!ok) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    if (kv.count(key))
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(kv[key].second) + ")");
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'");
    kv[key] = {value, line};
  }

  std::string missing;
  for (const auto& k : required)
    if (!kv.count(k)) missing += (missing.empty() ? "" : ", ") + k;
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing);

  RunConfig cfg;
  auto at = [&](const std::string& k) -> const std::pair<std::string, int>& { return kv.at(k); };

  {
    const auto& [v, ln] = at("dim");
    cfg.dim = static_cast<int>(detail::parse_long(v, ln, "dim"));
    if (cfg.dim != 2 && cfg.dim != 3)
      throw ConfigError("line " + std::to_string(ln) + ": dim must be 2 or 3");
  }
  {
    const auto& [v, ln] = at("n");
    cfg.n = static_cast<int>(detail::parse_long(v, ln, "n"));
    if (cfg.n < 8 || cfg.n % 2 != 0)
      throw ConfigError("line " + std::to_string(ln) + ": n must be even and at least 8");
  }
  double r, mu0, mu1;
  {
    const auto& [v, ln] = at("r");
    r = detail::parse_double(v, ln, "r");
    if (!(r >= 2.0)) throw ConfigError("line " + std::to_string(ln) + ": r must be at least 2");
    if (r < 3.0)
      cfg.warnings.push_back("r = " + v + " is outside theorem regime (r >= 3); proceeding anyway");
  }
  {
    const auto& [v, ln] = at("mu0");
    mu0 = detail::parse_double(v, ln, "mu0");
    if (!(mu0 > 0.0)) throw ConfigError("line " + std::to_string(ln) + ": mu0 must be positive");
  }
  {
    const auto& [v, ln] = at("mu1");
    mu1 = detail::parse_double(v, ln, "mu1");
    if (mu1 < 0.0) throw ConfigError("line " + std::to_string(ln) + ": mu1 must be nonnegative");
  }
  cfg.params.law = make_law(mu0, mu1, r);
  {
    const auto& [v, ln] = at("alpha1");
    cfg.params.alpha1 = detail::parse_double(v, ln, "alpha1");
    if (cfg.params.alpha1 < 0.0)
      throw ConfigError("line " + std::to_string(ln) + ": alpha1 must be nonnegative");
  }
  {
    const auto& [v, ln] = at("t_end");
    cfg.params.t_end = detail::parse_double(v, ln, "t_end");
    if (!(cfg.params.t_end > 0.0))
      throw ConfigError("line " + std::to_string(ln) + ": t_end must be positive");
  }
  if (kv.count("dt")) {
    const auto& [v, ln] = at("dt");
    if (v == "auto") {
      cfg.dt_auto = true;
    } else {
      cfg.params.dt = detail::parse_double(v, ln, "dt");
      cfg.dt_auto = false;
      if (!(cfg.params.dt > 0.0))
        throw ConfigError("line " + std::to_string(ln) + ": dt must be positive or 'auto'");
    }
  }
  if (kv.count("scheme")) {
    const auto& [v, ln] = at("scheme");
    if (v == "rk4")
      cfg.params.scheme = Scheme::rk4;
    else if (v == "imex")
      cfg.params.scheme = Scheme::imex;
    else
      throw ConfigError("line " + std::to_string(ln) + ": scheme must be rk4 or imex");
  }
  {
    const auto& [v, ln] = at("ic");
    detail::Descriptor d = detail::parse_descriptor(v, ln, "ic");
    if (d.name == "taylor_green") {
      cfg.params.ic.kind = ICKind::taylor_green;
      if (d.args.size() > 1)
        throw ConfigError("line " + std::to_string(ln) + ": taylor_green takes at most one argument");
      if (d.args.size() == 1) cfg.params.ic.amplitude = detail::parse_double(d.args[0], ln, "ic amplitude");
      if (!(cfg.params.ic.amplitude > 0.0))
        throw ConfigError("line " + std::to_string(ln) + ": taylor_green amplitude must be positive");
    } else if (d.name == "shear") {
      if (!d.args.empty()) throw ConfigError("line " + std::to_string(ln) + ": shear takes no arguments");
      cfg.params.ic.kind = ICKind::shear;
    } else if (d.name == "random_band") {
      if (d.args.size() != 3)
        throw ConfigError("line " + std::to_string(ln) + ": random_band needs (kmin, kmax, amplitude)");
      cfg.params.ic.kind = ICKind::random_band;
      cfg.params.ic.kmin = static_cast<int>(detail::parse_long(d.args[0], ln, "kmin"));
      cfg.params.ic.kmax = static_cast<int>(detail::parse_long(d.args[1], ln, "kmax"));
      cfg.params.ic.amplitude = detail::parse_double(d.args[2], ln, "ic amplitude");
      if (cfg.params.ic.kmin < 1 || cfg.params.ic.kmax < cfg.params.ic.kmin)
        throw ConfigError("line " + std::to_string(ln) + ": random_band needs 1 <= kmin <= kmax");
      if (!(cfg.params.ic.amplitude > 0.0))
        throw ConfigError("line " + std::to_string(ln) + ": random_band amplitude must be positive");
    } else if (d.name == "file") {
      if (d.args.size() != 1 || d.args[0].empty())
        throw ConfigError("line " + std::to_string(ln) + ": file needs a path argument");
      cfg.params.ic.kind = ICKind::file;
      cfg.params.ic.path = d.args[0];
    } else {
      throw ConfigError("line " + std::to_string(ln) + ": unknown ic '" + d.name + "'");
    }
  }
  if (kv.count("forcing")) {
    const auto& [v, ln] = at("forcing");
    detail::Descriptor d = detail::parse_descriptor(v, ln, "forcing");
    if (d.name == "none") {
      if (!d.args.empty()) throw ConfigError("line " + std::to_string(ln) + ": none takes no arguments");
      cfg.params.forcing.kind = ForcingKind::none;
    } else if (d.name == "steady_mode") {
      if (static_cast<int>(d.args.size()) != cfg.dim + 1)
        throw ConfigError("line " + std::to_string(ln) + ": steady_mode needs " + std::to_string(cfg.dim) +
                          " wavenumbers and an amplitude");
      cfg.params.forcing.kind = ForcingKind::steady_mode;
      for (int a = 0; a < cfg.dim; ++a)
        cfg.params.forcing.mode[static_cast<std::size_t>(a)] =
            static_cast<int>(detail::parse_long(d.args[static_cast<std::size_t>(a)], ln, "forcing mode"));
      cfg.params.forcing.amplitude = detail::parse_double(d.args.back(), ln, "forcing amplitude");
    } else if (d.name == "manufactured") {
      if (!d.args.empty())
        throw ConfigError("line " + std::to_string(ln) + ": manufactured takes no arguments");
      cfg.params.forcing.kind = ForcingKind::manufactured;
    } else {
      throw ConfigError("line " + std::to_string(ln) + ": unknown forcing '" + d.name + "'");
    }
  }
  if (kv.count("seed")) {
    const auto& [v, ln] = at("seed");
    cfg.params.seed = detail::parse_u64(v, ln, "seed");
  }
  if (kv.count("output_dir")) cfg.output_dir = at("output_dir").first;
  if (kv.count("snapshot_every")) {
    const auto& [v, ln] = at("snapshot_every");
    cfg.snapshot_every = detail::parse_long(v, ln, "snapshot_every");
    if (cfg.snapshot_every < 0)
      throw ConfigError("line " + std::to_string(ln) + ": snapshot_every must be nonnegative");
  }
  if (kv.count("records_file")) cfg.records_file = at("records_file").first;
  return cfg;
}

}  // namespace gsgf
