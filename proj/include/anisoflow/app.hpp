/// \file
/// Command implementations behind the `anisoflow` executable. Kept in the
/// library so the test suite can drive them without spawning processes.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisoflow/check/verify.hpp"
#include "anisoflow/config.hpp"
#include "anisoflow/diagnostics.hpp"
#include "anisoflow/flow_engine.hpp"
#include "anisoflow/io.hpp"
#include "anisoflow/reference.hpp"
#include "anisoflow/version.hpp"

namespace anisoflow::app {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kBadConfig = 2 };

inline RadialField make_initial(const ExperimentConfig& c) {
  const Grid g(c.grid_kind, c.m);
  switch (c.initial.shape) {
    case InitialShape::sphere: return sphere_initial(g, c.initial.radius);
    case InitialShape::ellipsoid: {
      auto f = elongated_initial(g, c.initial.aspect);
      if (c.initial.radius != 1.0)
        for (double& v : f.phi) v += std::log(c.initial.radius);
      return f;
    }
    case InitialShape::file: {
      auto snap = io::read_snapshot(c.initial.file);
      if ((snap.field.grid.kind() == GridKind::periodic_circle) != (c.params.n == 1))
        throw std::runtime_error("initial file grid kind does not match n");
      return snap.field;
    }
  }
  throw std::logic_error("unreachable");
}

struct RunSummary {
  RunResult result;
  DecayFit fit;
  double R_initial = 1.0;
  double R_max = 1.0;
};

inline RunSummary execute(const ExperimentConfig& c, const RadialField& init) {
  RunSummary s{run(init, c.params, c.stepper, c.mode), {}, 0.0, 0.0};
  s.fit = fit_decay(s.result.series);
  s.R_initial = s.result.series.front().R;
  for (const auto& d : s.result.series) s.R_max = std::max(s.R_max, d.R);
  return s;
}

inline json summary_json(const ExperimentConfig& c, const RunSummary& s) {
  const auto& res = s.result;
  DiagnosticsRecord lo = res.series.front(), hi = res.series.front();
  for (const auto& d : res.series) {
    lo.u_min = std::min(lo.u_min, d.u_min);
    lo.F_min = std::min(lo.F_min, d.F_min);
    hi.F_max = std::max(hi.F_max, d.F_max);
    lo.Phi_min = std::min(lo.Phi_min, d.Phi_min);
    hi.Phi_max = std::max(hi.Phi_max, d.Phi_max);
    lo.kappa_min = std::min(lo.kappa_min, d.kappa_min);
    hi.kappa_max = std::max(hi.kappa_max, d.kappa_max);
    lo.cone_margin = std::min(lo.cone_margin, d.cone_margin);
  }
  json j;
  j["tool"] = "anisoflow";
  j["version"] = kVersion;
  j["status"] = to_string(res.status);
  j["message"] = res.message;
  j["regime"] = to_string(c.params.regime());
  j["params"] = {{"n", c.params.n}, {"k", c.params.k}, {"alpha", c.params.alpha},
                 {"beta", c.params.beta}, {"gamma", c.params.gamma()}};
  j["mode"] = to_string(c.mode);
  j["grid"] = {{"kind", to_string(c.grid_kind)}, {"m", c.m}};
  j["steps"] = res.steps;
  j["t_final"] = res.t;
  j["R_initial"] = s.R_initial;
  j["R_max"] = s.R_max;
  j["initial"] = io::record_json(res.series.front());
  j["final"] = io::record_json(res.final_record());
  j["decay_fit"] = io::fit_json(s.fit);
  j["bounds"] = {{"u_min", lo.u_min},         {"F_min", lo.F_min},         {"F_max", hi.F_max},
                 {"Phi_min", lo.Phi_min},     {"Phi_max", hi.Phi_max},     {"kappa_min", lo.kappa_min},
                 {"kappa_max", hi.kappa_max}, {"cone_margin_min", lo.cone_margin}};
  if (res.cone_violation)
    j["cone_violation"] = {{"node", res.cone_violation->node}, {"sigma", res.cone_violation->per_j_values}};
  return j;
}

inline void write_outputs(const ExperimentConfig& c, const RunSummary& s, const fs::path& dir) {
  fs::create_directories(dir);
  if (c.output.csv) io::write_series_csv(dir / "series.csv", s.result.series);
  if (c.output.json) {
    fs::create_directories(dir / "snapshots");
    for (const auto& snap : s.result.snapshots) {
      char name[40];
      std::snprintf(name, sizeof name, "snap_%09lld.json", static_cast<long long>(snap.step));
      io::write_snapshot(dir / "snapshots" / name, snap);
    }
  }
  std::ofstream f(dir / "summary.json");
  if (!f) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  f << summary_json(c, s).dump(2) << '\n';
}

/// `run <config>`: a cone exit is an expected outcome (status blowup, exit 0).
inline int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err,
                   const std::string& out_override = "") {
  ExperimentConfig c;
  try {
    c = load_experiment(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  }
  try {
    const fs::path dir = out_override.empty() ? fs::path(c.output.directory) : fs::path(out_override);
    const auto s = execute(c, make_initial(c));
    write_outputs(c, s, dir);
    const auto& fin = s.result.final_record();
    out << "status=" << to_string(s.result.status) << " regime=" << to_string(c.params.regime())
        << " steps=" << s.result.steps << " t=" << fin.t << " R0=" << s.R_initial << " R=" << fin.R
        << " sphere_dev=" << fin.sphere_dev << " -> " << dir.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

/// `sweep <config>`: one run per (alpha, beta, k, aspect) cell, each in its own
/// subdirectory, merged into sweep.csv in cell order. Cell errors are recorded
/// and the sweep continues.
inline int cmd_sweep(const std::string& config_path, std::ostream& out, std::ostream& err,
                     const std::string& out_override = "") {
  ExperimentConfig base;
  SweepAxes axes;
  try {
    std::tie(base, axes) = load_sweep(load_ini(config_path));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  }
  const fs::path dir = out_override.empty() ? fs::path(base.output.directory) : fs::path(out_override);
  fs::create_directories(dir);
  const auto cells = sweep_cells(axes);
  std::ofstream csv(dir / "sweep.csv");
  if (!csv) {
    err << "error: cannot write " << (dir / "sweep.csv").string() << '\n';
    return kFailure;
  }
  csv << "cell,alpha,beta,k,aspect,regime,status,steps,t_final,R_initial,R_max,R_final,sphere_dev,decay_rate,error\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    ExperimentConfig c = base;
    c.params.alpha = cell.alpha;
    c.params.beta = cell.beta;
    c.params.k = cell.k;
    c.initial.aspect = cell.aspect;
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu", i);
    csv << name << ',' << io::fmt(cell.alpha) << ',' << io::fmt(cell.beta) << ',' << cell.k << ','
        << io::fmt(cell.aspect) << ',';
    try {
      c.params.validate();
      const auto s = execute(c, make_initial(c));
      write_outputs(c, s, dir / name);
      const auto& fin = s.result.final_record();
      csv << to_string(c.params.regime()) << ',' << to_string(s.result.status) << ',' << s.result.steps << ','
          << io::fmt(fin.t) << ',' << io::fmt(s.R_initial) << ',' << io::fmt(s.R_max) << ',' << io::fmt(fin.R)
          << ',' << io::fmt(fin.sphere_dev) << ',' << io::fmt(s.fit.rate) << ",\n";
      out << name << " alpha=" << cell.alpha << " beta=" << cell.beta << " k=" << cell.k
          << " aspect=" << cell.aspect << " regime=" << to_string(c.params.regime())
          << " status=" << to_string(s.result.status) << " R=" << fin.R << '\n';
    } catch (const std::exception& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      csv << (cell.k >= 1 && cell.k <= c.params.n ? to_string(c.params.regime()) : "invalid")
          << ",error,0,,,,,,," << msg << '\n';
      out << name << " error: " << e.what() << '\n';
    }
  }
  return kOk;
}

inline int cmd_emit_plot(const std::string& series_csv, const std::string& out_dir, std::ostream& out,
                         std::ostream& err) {
  try {
    const fs::path dir = out_dir.empty() ? fs::path(series_csv).parent_path() / "plot" : fs::path(out_dir);
    const auto files = io::emit_plot(series_csv, dir);
    out << "wrote " << files.size() << " files to " << dir.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

inline int cmd_verify(const check::VerifyOptions& opts, std::ostream& out) {
  const auto rows = check::run_verify_suite(opts);
  int failed = 0;
  out << std::left << std::setw(24) << "check" << std::setw(8) << "result" << "detail\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(24) << r.name << std::setw(8) << (r.passed ? "PASS" : "FAIL") << r.detail
        << '\n';
    failed += r.passed ? 0 : 1;
  }
  out << (rows.size() - failed) << "/" << rows.size() << " checks passed (seed " << opts.seed << ")\n";
  return failed == 0 ? kOk : kFailure;
}

}  // namespace anisoflow::app
