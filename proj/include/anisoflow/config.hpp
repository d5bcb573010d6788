/// \file
/// Experiment configuration: a flat `key = value` file with `[section]`
/// headers. Keys are addressed as `section.key`; `#` and `;` start comments.
///
///   [flow]     n, k, alpha, beta, mode (normalized | unnormalized)
///   [grid]     kind (periodic-circle | axisym-polar), m
///   [initial]  shape (sphere | ellipsoid | file), radius, aspect, file
///   [stepper]  cfl, t_end, max_steps, scheme (rk4 | euler), snapshot_every,
///              record_every, cone_tol, converge_tol, converge_steps
///   [output]   directory, formats (comma list of csv, json)
///   [sweep]    alpha, beta, k, aspect (comma lists; sweep command only)

#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "anisoflow/flow_engine.hpp"
#include "anisoflow/grid_geom.hpp"
#include "anisoflow/params.hpp"

namespace anisoflow {

struct ConfigError : std::runtime_error {
  int line;
  std::string key;
  ConfigError(const std::string& where, int ln, std::string k, const std::string& msg)
      : std::runtime_error(where + ":" + std::to_string(ln) + ": " + msg), line(ln), key(std::move(k)) {}
};

struct IniEntry {
  std::string value;
  int line = 0;
};

struct Ini {
  std::string source = "config";
  std::map<std::string, IniEntry> entries;

  const IniEntry* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline Ini parse_ini(std::istream& in, const std::string& source = "config") {
  Ini ini;
  ini.source = source;
  std::string section, raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const auto cut = raw.find_first_of("#;");
    const std::string line = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, ln, "", "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, ln, line, "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source, ln, "", "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (ini.entries.count(full)) throw ConfigError(source, ln, full, "duplicate key '" + full + "'");
    ini.entries[full] = {detail::trim(line.substr(eq + 1)), ln};
  }
  return ini;
}

inline Ini load_ini(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "", "cannot open config file");
  return parse_ini(f, path);
}

enum class InitialShape { sphere, ellipsoid, file };

struct InitialSpec {
  InitialShape shape = InitialShape::ellipsoid;
  double radius = 1.0;
  double aspect = 1.5;
  std::string file;
};

struct OutputSpec {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct ExperimentConfig {
  FlowParams params;
  GridKind grid_kind = GridKind::axisym_polar;
  int m = 128;
  InitialSpec initial;
  StepperConfig stepper;
  FlowMode mode = FlowMode::normalized;
  OutputSpec output;
};

struct SweepAxes {
  std::vector<double> alpha, beta, aspect;
  std::vector<int> k;
};

namespace detail {

class Reader {
 public:
  explicit Reader(const Ini& ini) : ini_(ini) {}

  const IniEntry* get(const std::string& key) {
    used_.insert(key);
    return ini_.find(key);
  }

  ConfigError error(const std::string& key, const std::string& msg) const {
    const IniEntry* e = ini_.find(key);
    return ConfigError(ini_.source, e ? e->line : 0, key, msg);
  }

  double number(const std::string& key, double fallback) {
    const IniEntry* e = get(key);
    if (!e) return fallback;
    return parse_number(key, e->value);
  }

  double parse_number(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw error(key, "key '" + key + "': expected a number, got '" + text + "'");
    }
  }

  long long integer(const std::string& key, long long fallback) {
    const IniEntry* e = get(key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument(e->value);
      return v;
    } catch (const std::exception&) {
      throw error(key, "key '" + key + "': expected an integer, got '" + e->value + "'");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const IniEntry* e = get(key);
    return e ? e->value : fallback;
  }

  std::vector<double> number_list(const std::string& key) {
    std::vector<double> out;
    const IniEntry* e = get(key);
    if (!e) return out;
    for (const auto& item : split_list(e->value)) out.push_back(parse_number(key, item));
    if (out.empty()) throw error(key, "key '" + key + "': empty list");
    return out;
  }

  /// Rejects any key that was never asked for.
  void reject_unknown() const {
    for (const auto& [key, entry] : ini_.entries)
      if (!used_.count(key)) throw ConfigError(ini_.source, entry.line, key, "unknown key '" + key + "'");
  }

  template <class Fn>
  void guard(const std::string& key, Fn&& fn) const {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw error(key, "key '" + key + "': " + e.what());
    }
  }

 private:
  const Ini& ini_;
  std::set<std::string> used_;
};

inline ExperimentConfig read_experiment(Reader& rd) {
  ExperimentConfig c;
  c.params.n = static_cast<int>(rd.integer("flow.n", 2));
  c.params.k = static_cast<int>(rd.integer("flow.k", 1));
  c.params.alpha = rd.number("flow.alpha", 3.0);
  c.params.beta = rd.number("flow.beta", 1.0);
  rd.guard("flow.n", [&] { c.params.validate(); });

  const std::string mode = rd.text("flow.mode", "normalized");
  if (mode == "normalized") c.mode = FlowMode::normalized;
  else if (mode == "unnormalized") c.mode = FlowMode::unnormalized;
  else throw rd.error("flow.mode", "key 'flow.mode': expected normalized or unnormalized, got '" + mode + "'");

  const std::string kind = rd.text("grid.kind", c.params.n == 1 ? "periodic-circle" : "axisym-polar");
  rd.guard("grid.kind", [&] { c.grid_kind = grid_kind_from_string(kind); });
  if ((c.grid_kind == GridKind::periodic_circle) != (c.params.n == 1))
    throw rd.error("grid.kind", "key 'grid.kind': " + kind + " is inconsistent with n = " + std::to_string(c.params.n));
  c.m = static_cast<int>(rd.integer("grid.m", 128));
  if (c.m < 8) throw rd.error("grid.m", "key 'grid.m': need at least 8 nodes");

  const std::string shape = rd.text("initial.shape", "ellipsoid");
  if (shape == "sphere") c.initial.shape = InitialShape::sphere;
  else if (shape == "ellipsoid") c.initial.shape = InitialShape::ellipsoid;
  else if (shape == "file") c.initial.shape = InitialShape::file;
  else throw rd.error("initial.shape", "key 'initial.shape': expected sphere, ellipsoid or file, got '" + shape + "'");
  c.initial.radius = rd.number("initial.radius", 1.0);
  if (!(c.initial.radius > 0.0)) throw rd.error("initial.radius", "key 'initial.radius': must be > 0");
  c.initial.aspect = rd.number("initial.aspect", 1.5);
  if (!(c.initial.aspect > 1.0)) throw rd.error("initial.aspect", "key 'initial.aspect': must be > 1");
  c.initial.file = rd.text("initial.file", "");
  if (c.initial.shape == InitialShape::file && c.initial.file.empty())
    throw rd.error("initial.shape", "key 'initial.file' is required when initial.shape = file");

  StepperConfig& s = c.stepper;
  s.cfl = rd.number("stepper.cfl", s.cfl);
  s.t_end = rd.number("stepper.t_end", s.t_end);
  s.max_steps = rd.integer("stepper.max_steps", s.max_steps);
  const std::string scheme = rd.text("stepper.scheme", "rk4");
  if (scheme == "rk4") s.scheme = Scheme::rk4;
  else if (scheme == "euler") s.scheme = Scheme::euler;
  else throw rd.error("stepper.scheme", "key 'stepper.scheme': expected rk4 or euler, got '" + scheme + "'");
  s.snapshot_every = static_cast<int>(rd.integer("stepper.snapshot_every", s.snapshot_every));
  s.record_every = static_cast<int>(rd.integer("stepper.record_every", s.record_every));
  s.cone_tol = rd.number("stepper.cone_tol", s.cone_tol);
  s.converge_tol = rd.number("stepper.converge_tol", s.converge_tol);
  s.converge_steps = static_cast<int>(rd.integer("stepper.converge_steps", s.converge_steps));
  rd.guard("stepper.cfl", [&] { s.validate(); });

  c.output.directory = rd.text("output.directory", c.output.directory);
  if (const IniEntry* e = rd.get("output.formats")) {
    c.output.csv = c.output.json = false;
    for (const auto& f : split_list(e->value)) {
      if (f == "csv") c.output.csv = true;
      else if (f == "json") c.output.json = true;
      else throw rd.error("output.formats", "key 'output.formats': unknown format '" + f + "'");
    }
  }
  return c;
}

}  // namespace detail

inline ExperimentConfig load_experiment(const Ini& ini) {
  detail::Reader rd(ini);
  auto c = detail::read_experiment(rd);
  rd.reject_unknown();
  return c;
}

inline ExperimentConfig load_experiment(const std::string& path) { return load_experiment(load_ini(path)); }

/// Base experiment plus the swept axes. Unlisted axes take the base value;
/// a listed axis must not be empty.
inline std::pair<ExperimentConfig, SweepAxes> load_sweep(const Ini& ini) {
  detail::Reader rd(ini);
  SweepAxes ax;
  bool any = false;
  for (const char* key : {"sweep.alpha", "sweep.beta", "sweep.k", "sweep.aspect"}) {
    if (const IniEntry* e = ini.find(key); e && detail::split_list(e->value).empty())
      throw rd.error(key, std::string("key '") + key + "': empty list");
  }
  ax.alpha = rd.number_list("sweep.alpha");
  ax.beta = rd.number_list("sweep.beta");
  ax.aspect = rd.number_list("sweep.aspect");
  for (double v : rd.number_list("sweep.k")) {
    if (v != static_cast<int>(v)) throw rd.error("sweep.k", "key 'sweep.k': entries must be integers");
    ax.k.push_back(static_cast<int>(v));
  }
  any = !ax.alpha.empty() || !ax.beta.empty() || !ax.aspect.empty() || !ax.k.empty();
  if (!any) throw ConfigError(ini.source, 0, "sweep", "sweep: no [sweep] lists given");
  auto base = detail::read_experiment(rd);
  rd.reject_unknown();
  if (ax.alpha.empty()) ax.alpha = {base.params.alpha};
  if (ax.beta.empty()) ax.beta = {base.params.beta};
  if (ax.k.empty()) ax.k = {base.params.k};
  if (ax.aspect.empty()) ax.aspect = {base.initial.aspect};
  return {base, ax};
}

struct SweepCell {
  double alpha, beta;
  int k;
  double aspect;
  auto key() const { return std::tie(alpha, beta, k, aspect); }
  bool operator<(const SweepCell& o) const { return key() < o.key(); }
  bool operator==(const SweepCell& o) const { return key() == o.key(); }
};

/// Cartesian product in (alpha, beta, k, aspect) order with duplicates removed
/// (first occurrence wins).
inline std::vector<SweepCell> sweep_cells(const SweepAxes& ax) {
  std::vector<SweepCell> cells;
  std::set<SweepCell> seen;
  for (double a : ax.alpha)
    for (double b : ax.beta)
      for (int k : ax.k)
        for (double s : ax.aspect) {
          SweepCell c{a, b, k, s};
          if (seen.insert(c).second) cells.push_back(c);
        }
  return cells;
}

}  // namespace anisoflow
