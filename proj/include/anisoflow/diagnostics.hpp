/// \file
/// Scalar observables of a snapshot and the reductions used to check the
/// convergence and blow-up claims: radius extrema and their ratio, the
/// gradient norm max|Dr|/r, bound monitors for F, Phi and the curvatures,
/// exponential tail fits, and sphere-sandwich checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "anisoflow/grid_geom.hpp"

namespace anisoflow {

struct DiagnosticsRecord {
  double t = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double R = 1.0;           ///< r_max / r_min
  double grad_norm = 0.0;   ///< max |Dr| / r, computed as max |D phi|
  double u_min = 0.0;
  double F_min = 0.0;
  double F_max = 0.0;
  double Phi_min = 0.0;
  double Phi_max = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double cone_margin = 0.0; ///< min over nodes and 1 <= j <= k of sigma_j
  double sphere_dev = 0.0;  ///< (r_max - r_min) / mean(r_max, r_min)
};

/// Field-wise extrema of a geometry state. Reductions run in node order so the
/// result is bit-reproducible.
inline DiagnosticsRecord record(const GeometryState& s, double t) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  DiagnosticsRecord d;
  d.t = t;
  d.r_min = d.u_min = d.F_min = d.Phi_min = d.kappa_min = d.cone_margin = inf;
  d.r_max = d.F_max = d.Phi_max = d.kappa_max = -inf;
  d.grad_norm = 0.0;
  const bool rot = !s.kappa_rot.empty();
  for (int i = 0; i < s.size(); ++i) {
    d.r_min = std::min(d.r_min, s.r[i]);
    d.r_max = std::max(d.r_max, s.r[i]);
    d.grad_norm = std::max(d.grad_norm, std::abs(s.dphi[i]));
    d.u_min = std::min(d.u_min, s.u[i]);
    d.F_min = std::min(d.F_min, s.F[i]);
    d.F_max = std::max(d.F_max, s.F[i]);
    d.Phi_min = std::min(d.Phi_min, s.Phi[i]);
    d.Phi_max = std::max(d.Phi_max, s.Phi[i]);
    d.kappa_min = std::min(d.kappa_min, s.kappa_mer[i]);
    d.kappa_max = std::max(d.kappa_max, s.kappa_mer[i]);
    if (rot) {
      d.kappa_min = std::min(d.kappa_min, s.kappa_rot[i]);
      d.kappa_max = std::max(d.kappa_max, s.kappa_rot[i]);
    }
    d.cone_margin = std::min(d.cone_margin, s.cone_margin[i]);
  }
  d.R = d.r_max / d.r_min;
  d.sphere_dev = (d.r_max - d.r_min) / (0.5 * (d.r_max + d.r_min));
  return d;
}

struct DecayFit {
  double rate = 0.0;       ///< a in grad_norm ~ C exp(-a t)
  double amplitude = 0.0;  ///< C
  double residual = 0.0;   ///< RMS of the log-linear fit
  int points = 0;
  bool below_floor = false;
};

/// Least-squares line through (t, log g) over the final `tail_fraction` of the
/// series. Points at or below `floor` are dropped; fewer than ten survivors
/// give rate = +inf with below_floor set.
inline DecayFit fit_decay(std::span<const double> t, std::span<const double> g,
                          double tail_fraction = 0.5, double floor = 1e-14) {
  DecayFit fit;
  const std::size_t n = std::min(t.size(), g.size());
  const double frac = std::clamp(tail_fraction, 0.0, 1.0);
  const std::size_t first = n - static_cast<std::size_t>(std::ceil(frac * n));
  std::vector<double> xs, ys;
  for (std::size_t i = first; i < n; ++i) {
    if (g[i] > floor && std::isfinite(g[i])) {
      xs.push_back(t[i]);
      ys.push_back(std::log(g[i]));
    }
  }
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 10) {
    fit.rate = std::numeric_limits<double>::infinity();
    fit.below_floor = true;
    return fit;
  }
  const double cnt = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= cnt;
  my /= cnt;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss += e * e;
  }
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  fit.residual = std::sqrt(ss / cnt);
  return fit;
}

inline DecayFit fit_decay(std::span<const DiagnosticsRecord> series, double tail_fraction = 0.5) {
  std::vector<double> t, g;
  t.reserve(series.size());
  g.reserve(series.size());
  for (const auto& d : series) {
    t.push_back(d.t);
    g.push_back(d.grad_norm);
  }
  return fit_decay(t, g, tail_fraction);
}

struct SandwichReport {
  std::vector<bool> ok;        ///< per record
  double worst_violation = 0;  ///< largest amount by which a bound was exceeded (0 if none)
  std::size_t worst_index = 0;
  bool all_ok() const { return std::all_of(ok.begin(), ok.end(), [](bool b) { return b; }); }
};

/// Checks lower(t) - eps <= r_min(t) and r_max(t) <= upper(t) + eps.
inline SandwichReport sandwich_check(std::span<const DiagnosticsRecord> series,
                                     const std::function<double(double)>& lower,
                                     const std::function<double(double)>& upper, double eps) {
  SandwichReport rep;
  rep.ok.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& d = series[i];
    const double below = lower(d.t) - d.r_min;
    const double above = d.r_max - upper(d.t);
    const double v = std::max(below, above);
    rep.ok.push_back(v <= eps);
    if (v > rep.worst_violation) {
      rep.worst_violation = v;
      rep.worst_index = i;
    }
  }
  return rep;
}

/// Linear interpolation of a series column at time t (clamped at the ends).
template <class Get>
double interpolate_at(std::span<const DiagnosticsRecord> series, double t, Get&& get) {
  if (series.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (t <= series.front().t) return get(series.front());
  if (t >= series.back().t) return get(series.back());
  auto it = std::lower_bound(series.begin(), series.end(), t,
                             [](const DiagnosticsRecord& d, double x) { return d.t < x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return (1.0 - w) * get(a) + w * get(b);
}

}  // namespace anisoflow
