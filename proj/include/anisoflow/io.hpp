/// \file
/// Persistence: the diagnostics series as CSV, field snapshots and run
/// summaries as JSON, and plain two-column plot files.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisoflow/diagnostics.hpp"
#include "anisoflow/flow_engine.hpp"
#include "anisoflow/grid_geom.hpp"

namespace anisoflow::io {

using nlohmann::json;

inline constexpr std::array<const char*, 14> kSeriesColumns = {
    "t",       "r_min",   "r_max",     "R",         "grad_norm",   "u_min",     "F_min",
    "F_max",   "Phi_min", "Phi_max",   "kappa_min", "kappa_max",   "cone_margin", "sphere_dev"};

inline std::array<double, 14> columns(const DiagnosticsRecord& d) {
  return {d.t,       d.r_min,   d.r_max,     d.R,         d.grad_norm,   d.u_min,       d.F_min,
          d.F_max,   d.Phi_min, d.Phi_max,   d.kappa_min, d.kappa_max,   d.cone_margin, d.sphere_dev};
}

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_series_csv(std::ostream& out, std::span<const DiagnosticsRecord> series) {
  for (std::size_t i = 0; i < kSeriesColumns.size(); ++i) out << (i ? "," : "") << kSeriesColumns[i];
  out << '\n';
  for (const auto& d : series) {
    const auto c = columns(d);
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << fmt(c[i]);
    out << '\n';
  }
}

inline void write_series_csv(const std::filesystem::path& path, std::span<const DiagnosticsRecord> series) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write_series_csv(f, series);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  int ln = 1;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        // stod throws on subnormals
        row.push_back(std::strtod(cell.c_str(), nullptr));
      }
    }
    if (row.size() != t.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(ln) + ": expected " +
                               std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline json snapshot_json(const Snapshot& s) {
  return {{"t", s.t},
          {"step", s.step},
          {"grid", {{"kind", to_string(s.field.grid.kind())}, {"m", s.field.grid.size()}}},
          {"phi", s.field.phi}};
}

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << snapshot_json(s).dump() << '\n';
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read snapshot " + path.string());
  json j;
  try {
    f >> j;
    const Grid g(grid_kind_from_string(j.at("grid").at("kind").get<std::string>()), j.at("grid").at("m").get<int>());
    RadialField field(g, j.at("phi").get<std::vector<double>>());
    if (!field.all_finite()) throw std::runtime_error("non-finite phi");
    return {j.value("t", 0.0), j.value("step", std::int64_t{0}), std::move(field)};
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid snapshot " + path.string() + ": " + e.what());
  }
}

inline json record_json(const DiagnosticsRecord& d) {
  json j;
  const auto c = columns(d);
  for (std::size_t i = 0; i < c.size(); ++i) j[kSeriesColumns[i]] = c[i];
  return j;
}

inline json fit_json(const DecayFit& f) {
  json j = {{"rate", f.rate}, {"amplitude", f.amplitude}, {"residual", f.residual},
            {"points", f.points}, {"below_floor", f.below_floor}};
  if (!std::isfinite(f.rate)) j["rate"] = nullptr;
  return j;
}

/// One column of the series against t, whitespace separated, one pair per line.
inline std::vector<std::filesystem::path> emit_plot(const std::filesystem::path& series_csv,
                                                    const std::filesystem::path& out_dir) {
  const Table t = read_csv(series_csv);
  if (t.header.empty() || t.header.front() != "t")
    throw std::runtime_error(series_csv.string() + ": first column must be t");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    const auto path = out_dir / (t.header[c] + ".dat");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "# t " << t.header[c] << '\n';
    for (const auto& row : t.rows) f << fmt(row[0]) << ' ' << fmt(row[c]) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace anisoflow::io
