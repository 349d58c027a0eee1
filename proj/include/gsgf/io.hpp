#pragma once

// Persistence: restart snapshots and the per-step record series.
//
// Snapshot layout (version 1, little-endian): magic "GSGF", u32 version,
// u32 dim, u32 n, f64 t, alpha1, mu0, mu1, r, then for each velocity
// component the full mode lattice in flat row-major order as (re, im) f64
// pairs. Mode coefficients are stored rather than point samples so a
// resumed run continues from the exact prognostic state, bit for bit.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsgf/constitutive.hpp"
#include "gsgf/diagnostics.hpp"
#include "gsgf/stepper.hpp"

namespace gsgf {

inline constexpr char kRecordsHeader[] =
    "t,E,dissipation,forcing_power,l2,h1,h2,w1r,Ir,energy_residual,id_res_1,id_res_2,id_res_3";

struct SnapshotHeader {
  int dim = 0;
  int n = 0;
  double t = 0.0;
  double alpha1 = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double r = 0.0;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("snapshot truncated while reading " + what);
  return v;
}

inline double get_f64(std::istream& is, const std::string& what) {
  double v = 0.0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("snapshot truncated while reading " + what);
  return v;
}

}  // namespace detail

inline void write_snapshot(const SimState& s, const ConstitutiveLaw& law, double alpha1,
                           const std::string& path) {
  const Grid& g = s.u.grid();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path);
  os.write("GSGF", 4);
  detail::put_u32(os, 1u);
  detail::put_u32(os, static_cast<std::uint32_t>(g.dim()));
  detail::put_u32(os, static_cast<std::uint32_t>(g.n()));
  detail::put_f64(os, s.t);
  detail::put_f64(os, alpha1);
  detail::put_f64(os, law.mu0);
  detail::put_f64(os, law.mu1);
  detail::put_f64(os, law.r);
  for (int i = 0; i < g.dim(); ++i)
    for (std::size_t m = 0; m < g.size(); ++m) {
      detail::put_f64(os, s.u[i][m].real());
      detail::put_f64(os, s.u[i][m].imag());
    }
  if (!os) throw std::runtime_error("short write to snapshot: " + path);
}

inline SnapshotHeader read_snapshot_header(std::istream& is) {
  char magic[4] = {0, 0, 0, 0};
  if (!is.read(magic, 4) || std::memcmp(magic, "GSGF", 4) != 0)
    throw std::runtime_error("snapshot magic mismatch (not a snapshot file)");
  const std::uint32_t version = detail::get_u32(is, "version");
  if (version != 1u)
    throw std::runtime_error("snapshot version mismatch: got " + std::to_string(version));
  SnapshotHeader h;
  h.dim = static_cast<int>(detail::get_u32(is, "dim"));
  h.n = static_cast<int>(detail::get_u32(is, "n"));
  h.t = detail::get_f64(is, "t");
  h.alpha1 = detail::get_f64(is, "alpha1");
  h.mu0 = detail::get_f64(is, "mu0");
  h.mu1 = detail::get_f64(is, "mu1");
  h.r = detail::get_f64(is, "r");
  return h;
}

// Reads a snapshot against an existing grid; the stored lattice must match.
inline SimState read_snapshot(const std::string& path, const Grid& g, SnapshotHeader* header = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path);
  SnapshotHeader h = read_snapshot_header(is);
  if (h.dim != g.dim() || h.n != g.n())
    throw std::runtime_error("snapshot dimension mismatch: file is dim=" + std::to_string(h.dim) +
                             " n=" + std::to_string(h.n) + ", grid is dim=" + std::to_string(g.dim()) +
                             " n=" + std::to_string(g.n()));
  SimState s;
  s.t = h.t;
  s.u = SpectralVectorField(g);
  for (int i = 0; i < g.dim(); ++i)
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double re = detail::get_f64(is, "mode data");
      const double im = detail::get_f64(is, "mode data");
      s.u[i][m] = {re, im};
    }
  if (header != nullptr) *header = h;
  return s;
}

namespace detail {

inline void append_double(std::string& out, double v) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

}  // namespace detail

// Shortest-roundtrip decimal CSV; reparsing reproduces every double exactly.
inline std::string format_records(const std::vector<EnergyRecord>& series) {
  std::string out(kRecordsHeader);
  out.push_back('\n');
  for (const EnergyRecord& r : series) {
    const double cols[10] = {r.t,  r.E,  r.dissipation, r.forcing_power, r.l2,
                             r.h1, r.h2, r.w1r,         r.Ir,            r.energy_residual};
    for (int c = 0; c < 10; ++c) {
      if (c > 0) out.push_back(',');
      detail::append_double(out, cols[c]);
    }
    for (int c = 0; c < 3; ++c) {
      out.push_back(',');
      detail::append_double(out, r.id_res[static_cast<std::size_t>(c)]);
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_records(const std::vector<EnergyRecord>& series, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open records file for writing: " + path);
  const std::string text = format_records(series);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::runtime_error("short write to records file: " + path);
}

inline std::vector<EnergyRecord> parse_records(const std::string& text) {
  std::vector<EnergyRecord> out;
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      line = text.substr(pos);
      pos = text.size();
    } else {
      line = text.substr(pos, nl - pos);
      pos = nl + 1;
    }
    return true;
  };
  std::string line;
  if (!next_line(line) || line != kRecordsHeader)
    throw std::runtime_error("records header mismatch");
  while (next_line(line)) {
    if (line.empty()) continue;
    double vals[13];
    const char* b = line.data();
    const char* e = line.data() + line.size();
    for (int c = 0; c < 13; ++c) {
      if (c > 0) {
        if (b >= e || *b != ',') throw std::runtime_error("records row malformed: " + line);
        ++b;
      }
      auto res = std::from_chars(b, e, vals[c]);
      if (res.ec != std::errc{}) throw std::runtime_error("records row malformed: " + line);
      b = res.ptr;
    }
    if (b != e) throw std::runtime_error("records row has trailing data: " + line);
    EnergyRecord r;
    r.t = vals[0];
    r.E = vals[1];
    r.dissipation = vals[2];
    r.forcing_power = vals[3];
    r.l2 = vals[4];
    r.h1 = vals[5];
    r.h2 = vals[6];
    r.w1r = vals[7];
    r.Ir = vals[8];
    r.energy_residual = vals[9];
    r.id_res = {vals[10], vals[11], vals[12]};
    out.push_back(r);
  }
  return out;
}

inline std::vector<EnergyRecord> read_records(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open records file: " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_records(text);
}

}  // namespace gsgf
