/// \file
/// Explicit time stepping of the scalar radial-graph equation
///
///   d phi / dt = -exp((alpha/beta - 1) phi) sqrt(1 + |D phi|^2) sigma_k^(1/beta) [+ gamma]
///
/// where the bracketed term is present for the normalized flow only, plus the
/// rescaling maps that relate the two flows.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anisoflow/diagnostics.hpp"
#include "anisoflow/grid_geom.hpp"
#include "anisoflow/params.hpp"

namespace anisoflow {

enum class FlowMode { normalized, unnormalized };
enum class Scheme { rk4, euler };

inline const char* to_string(FlowMode m) {
  return m == FlowMode::normalized ? "normalized" : "unnormalized";
}
inline const char* to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "euler"; }

struct StepperConfig {
  double cfl = 0.2;
  double t_end = 1.0;
  std::int64_t max_steps = 10'000'000;
  int snapshot_every = 0;      ///< 0 disables periodic snapshots (first and last are always kept)
  int record_every = 1;        ///< keep every n-th diagnostics record in the series
  double cone_tol = -1.0;      ///< < 0 selects the scale-aware default
  Scheme scheme = Scheme::rk4;
  double converge_tol = 1e-6;  ///< sphere_dev threshold; <= 0 disables the convergence stop
  int converge_steps = 50;     ///< consecutive steps below converge_tol

  void validate() const {
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("StepperConfig: cfl must lie in (0, 1]");
    if (!(t_end > 0.0)) throw std::invalid_argument("StepperConfig: t_end must be > 0");
    if (max_steps < 1) throw std::invalid_argument("StepperConfig: max_steps must be >= 1");
    if (snapshot_every < 0) throw std::invalid_argument("StepperConfig: snapshot_every must be >= 0");
    if (record_every < 1) throw std::invalid_argument("StepperConfig: record_every must be >= 1");
    if (converge_steps < 1) throw std::invalid_argument("StepperConfig: converge_steps must be >= 1");
  }
};

struct FlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A node left Gamma_k^+; the flow is no longer parabolic there.
struct ConeViolation : FlowError {
  int node;
  std::vector<double> per_j_values;
  ConeViolation(int i, std::vector<double> sj)
      : FlowError("cone violation at node " + std::to_string(i)), node(i), per_j_values(std::move(sj)) {}
};

struct NonFinite : FlowError {
  int node;
  explicit NonFinite(int i) : FlowError("non-finite value at node " + std::to_string(i)), node(i) {}
};

struct StabilityError : FlowError {
  using FlowError::FlowError;
};

namespace detail {

inline void enforce_cone(const GeometryState& g) {
  for (int i = 0; i < g.size(); ++i) {
    if (g.cone_order[i] < g.params.k) {
      const auto kv = g.kappa(i);
      const auto all = sigma_all(kv);
      throw ConeViolation(i, std::vector<double>(all.begin() + 1, all.end()));
    }
  }
}

// r^(alpha/beta - 1) rho F = Phi rho / r.
inline std::vector<double> rhs_from(const GeometryState& g, FlowMode mode) {
  enforce_cone(g);
  const double shift = mode == FlowMode::normalized ? g.params.gamma() : 0.0;
  std::vector<double> out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = -g.Phi[i] * g.rho[i] / g.r[i] + shift;
  return out;
}

// d(rhs)/d(phi'') at each node, through kappa_mer = (1 - phi''/rho^2)/(r rho):
//   D = r^(alpha/beta - 1) rho (1/beta) sigma_k^(1/beta - 1) sigma_{k-1}(kappa|mer) / (r rho^3)
//     = Phi sigma_{k-1}(kappa|mer) / (beta sigma_k r^2 rho^2).
inline double max_diffusivity(const GeometryState& g) {
  const double inv_beta = 1.0 / g.params.beta;
  double dmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.size(); ++i) {
    const double rr = g.r[i] * g.rho[i];
    const double d = inv_beta * g.Phi[i] * g.sigma_k_minus_mer[i] / (g.sigma_k[i] * rr * rr);
    if (!std::isfinite(d)) throw StabilityError("non-finite diffusivity at node " + std::to_string(i));
    dmax = std::max(dmax, d);
  }
  return dmax;
}

inline double dt_from(const GeometryState& g, double cfl) {
  const double dmax = max_diffusivity(g);
  if (!(dmax > 0.0)) throw StabilityError("degenerate parabolicity: max diffusivity " + std::to_string(dmax));
  const double h = g.grid.spacing();
  return cfl * h * h / dmax;
}

}  // namespace detail

/// Right-hand side of the normalized scalar equation at every node. Throws
/// ConeViolation if any node is outside Gamma_k^+ beyond the tolerance.
inline std::vector<double> rhs_normalized(const RadialField& f, const FlowParams& p, double cone_tol = -1.0) {
  return detail::rhs_from(geometry(f, p, cone_tol), FlowMode::normalized);
}

/// Same without the +gamma rescaling term.
inline std::vector<double> rhs_unnormalized(const RadialField& f, const FlowParams& p, double cone_tol = -1.0) {
  return detail::rhs_from(geometry(f, p, cone_tol), FlowMode::unnormalized);
}

inline std::vector<double> rhs(const RadialField& f, const FlowParams& p, FlowMode mode, double cone_tol = -1.0) {
  return detail::rhs_from(geometry(f, p, cone_tol), mode);
}

/// Largest linearized diffusivity d(rhs)/d(phi'') over the grid.
inline double max_diffusivity(const RadialField& f, const FlowParams& p) {
  return detail::max_diffusivity(geometry(f, p));
}

/// Parabolic CFL step: cfl h^2 / D_max.
inline double stable_dt(const RadialField& f, const FlowParams& p, const StepperConfig& cfg) {
  const auto g = geometry(f, p, cfg.cone_tol);
  detail::enforce_cone(g);
  return detail::dt_from(g, cfg.cfl);
}

struct StepResult {
  RadialField field;
  double dt;
  DiagnosticsRecord record;  ///< diagnostics of the new field at time t + dt
};

namespace detail {

inline void check_finite(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw NonFinite(static_cast<int>(i));
}

inline RadialField axpy(const RadialField& f, double a, const std::vector<double>& d) {
  RadialField out = f;
  for (std::size_t i = 0; i < d.size(); ++i) out.phi[i] += a * d[i];
  check_finite(out.phi);
  return out;
}

// One step from a field whose geometry is already known. `dt` is fixed.
inline RadialField advance(const RadialField& f, const GeometryState& g0, double dt, FlowMode mode,
                           const StepperConfig& cfg) {
  const auto k1 = rhs_from(g0, mode);
  if (cfg.scheme == Scheme::euler) return axpy(f, dt, k1);
  const FlowParams& p = g0.params;
  const auto k2 = rhs_from(geometry(axpy(f, 0.5 * dt, k1), p, cfg.cone_tol), mode);
  const auto k3 = rhs_from(geometry(axpy(f, 0.5 * dt, k2), p, cfg.cone_tol), mode);
  const auto k4 = rhs_from(geometry(axpy(f, dt, k3), p, cfg.cone_tol), mode);
  RadialField out = f;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.phi.size(); ++i)
    out.phi[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  check_finite(out.phi);
  return out;
}

}  // namespace detail

/// One explicit step of size stable_dt (optionally capped by dt_cap).
inline StepResult step(const RadialField& f, const FlowParams& p, const StepperConfig& cfg,
                       FlowMode mode = FlowMode::normalized, double t = 0.0,
                       double dt_cap = std::numeric_limits<double>::infinity()) {
  const auto g0 = geometry(f, p, cfg.cone_tol);
  detail::enforce_cone(g0);
  const double dt = std::min(detail::dt_from(g0, cfg.cfl), dt_cap);
  auto next = detail::advance(f, g0, dt, mode, cfg);
  auto rec = record(geometry(next, p, cfg.cone_tol), t + dt);
  return {std::move(next), dt, rec};
}

/// phi(t): the factor with X_normalized = X / phi(t).
///   exp(-gamma t)                                         if alpha = k + beta
///   (1 + (alpha - beta - k) gamma t / beta)^(beta / (k + beta - alpha))  otherwise
inline double rescale_factor(double t, const FlowParams& p) {
  if (t < 0.0) throw std::domain_error("rescale_factor: t must be >= 0");
  if (p.is_critical()) return std::exp(-p.gamma() * t);
  const double q = p.excess();
  const double base = 1.0 + q * p.gamma() * t;
  if (!(base > 0.0))
    throw std::domain_error("rescale_factor: t = " + std::to_string(t) + " is past the singular time " +
                            std::to_string(-1.0 / (q * p.gamma())));
  return std::pow(base, -1.0 / q);
}

/// Normalized time tau(t):
///   t                                                                     if alpha = k + beta
///   (beta log(beta + (alpha-beta-k) gamma t) - beta log beta) / ((alpha-beta-k) gamma)  otherwise
inline double tau(double t, const FlowParams& p) {
  if (t < 0.0) throw std::domain_error("tau: t must be >= 0");
  if (p.is_critical()) return t;
  const double c = (p.alpha - p.beta - p.k) * p.gamma();
  const double arg = p.beta + c * t;
  if (!(arg > 0.0)) throw std::domain_error("tau: log argument is not positive at t = " + std::to_string(t));
  return p.beta * std::log1p(c * t / p.beta) / c;
}

/// Inverse of tau.
inline double tau_inverse(double s, const FlowParams& p) {
  if (p.is_critical()) return s;
  const double c = (p.alpha - p.beta - p.k) * p.gamma();
  return p.beta * std::expm1(c * s / p.beta) / c;
}

enum class RunStatus { converged, t_end, max_steps, blowup };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::t_end: return "t_end";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::blowup: return "blowup";
  }
  return "?";
}

struct Snapshot {
  double t;
  std::int64_t step;
  RadialField field;
};

struct RunResult {
  RunStatus status = RunStatus::t_end;
  std::string message;
  std::vector<DiagnosticsRecord> series;
  std::vector<Snapshot> snapshots;
  std::int64_t steps = 0;
  double t = 0.0;
  RadialField final_field;
  std::optional<ConeViolation> cone_violation;

  const DiagnosticsRecord& final_record() const { return series.back(); }
};

/// Integrate from `initial` until t_end, max_steps, convergence to a sphere
/// (sphere_dev below converge_tol for converge_steps consecutive steps) or a
/// cone exit / non-finite value, which ends the run with status blowup while
/// keeping everything recorded so far.
inline RunResult run(const RadialField& initial, const FlowParams& p, const StepperConfig& cfg,
                     FlowMode mode = FlowMode::normalized) {
  p.validate();
  cfg.validate();
  RunResult res{RunStatus::t_end, {}, {}, {}, 0, 0.0, initial, std::nullopt};
  RadialField field = initial;
  auto geom = geometry(field, p, cfg.cone_tol);
  auto rec = record(geom, 0.0);
  res.series.push_back(rec);
  res.snapshots.push_back({0.0, 0, field});
  double t = 0.0;
  std::int64_t steps = 0;
  int streak = 0;
  bool last_recorded = true;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

  for (;;) {
    if (t >= cfg.t_end - t_eps) {
      res.status = RunStatus::t_end;
      break;
    }
    if (steps >= cfg.max_steps) {
      res.status = RunStatus::max_steps;
      break;
    }
    try {
      detail::enforce_cone(geom);
      const double dt = std::min(detail::dt_from(geom, cfg.cfl), cfg.t_end - t);
      field = detail::advance(field, geom, dt, mode, cfg);
      t += dt;
      ++steps;
      geom = geometry(field, p, cfg.cone_tol);
    } catch (const ConeViolation& e) {
      res.status = RunStatus::blowup;
      res.message = e.what();
      res.cone_violation = e;
      break;
    } catch (const FlowError& e) {
      res.status = RunStatus::blowup;
      res.message = e.what();
      break;
    }
    rec = record(geom, t);
    last_recorded = steps % cfg.record_every == 0;
    if (last_recorded) res.series.push_back(rec);
    if (cfg.snapshot_every > 0 && steps % cfg.snapshot_every == 0) res.snapshots.push_back({t, steps, field});

    if (cfg.converge_tol > 0.0 && rec.sphere_dev < cfg.converge_tol) {
      if (++streak >= cfg.converge_steps) {
        res.status = RunStatus::converged;
        break;
      }
    } else {
      streak = 0;
    }
  }
  if (!last_recorded) res.series.push_back(rec);
  if (res.snapshots.back().step != steps) res.snapshots.push_back({t, steps, field});
  res.steps = steps;
  res.t = t;
  res.final_field = field;
  return res;
}

}  // namespace anisoflow
