/// \file
/// Closed-form solutions and reference data: centred spheres under both
/// flows, the graph profile used to build blow-up examples in the sub-critical
/// regime, and ellipsoidal initial data.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "anisoflow/flow_engine.hpp"
#include "anisoflow/grid_geom.hpp"
#include "anisoflow/params.hpp"

namespace anisoflow {

/// A centred sphere of initial radius a0.
struct SphereSolution {
  double a0;
  FlowParams params;

  SphereSolution(double radius, FlowParams p) : a0(radius), params(p) {
    if (!(a0 > 0.0)) throw std::invalid_argument("SphereSolution: a0 must be > 0");
  }
};

/// Finite extinction time of the unnormalized sphere, if any.
///
/// da/dt = -gamma a^(1+q) with q = (alpha - k - beta)/beta integrates to
/// a^(-q) = a0^(-q) + q gamma t. Only q < 0 reaches a = 0 in finite time,
/// at T = a0^(-q) / (-q gamma). For q >= 0 the sphere shrinks forever.
inline std::optional<double> extinction_time(const SphereSolution& s) {
  const double q = s.params.excess();
  if (q >= 0.0) return std::nullopt;
  return std::pow(s.a0, -q) / (-q * s.params.gamma());
}

/// Radius of the sphere solution at time t.
///
/// Normalized: da/dt = gamma (a - a^((alpha-k)/beta)). With w = a^(-q) this is
/// linear, dw/dt = -q gamma (w - 1), so
///   a(t) = ( e^{q gamma t} / (e^{q gamma t} - (a0^q - 1)/a0^q) )^(1/q),
/// and a(t) = a0 in the critical case.
/// Unnormalized: a(t) = (a0^(-q) + q gamma t)^(-1/q), or a0 e^{-gamma t} when q = 0.
inline double sphere_radius(double t, const SphereSolution& s, FlowMode mode = FlowMode::normalized) {
  if (t < 0.0) throw std::domain_error("sphere_radius: t must be >= 0");
  const FlowParams& p = s.params;
  const double g = p.gamma();
  const double q = p.excess();
  if (mode == FlowMode::normalized) {
    if (q == 0.0) return s.a0;
    // e^{q g t} / (e^{q g t} - 1 + a0^{-q}) rewritten as 1 / (1 + (a0^{-q} - 1) e^{-q g t}).
    const double w = 1.0 + (std::pow(s.a0, -q) - 1.0) * std::exp(-q * g * t);
    if (!(w > 0.0))
      throw std::domain_error("sphere_radius: normalized sphere left the domain before t = " + std::to_string(t));
    return std::pow(w, -1.0 / q);
  }
  if (q == 0.0) return s.a0 * std::exp(-g * t);
  if (auto te = extinction_time(s); te && t >= *te)
    throw std::domain_error("sphere_radius: t = " + std::to_string(t) + " is past extinction time " +
                            std::to_string(*te));
  return std::pow(std::pow(s.a0, -q) + q * g * t, -1.0 / q);
}

/// Exponents of the sub-critical graph profile
///   -|t|^th + |t|^(-th + s th) x^2                             for x < |t|^th
///   -|t|^th - (1-s)/(1+s) |t|^(th(1+s)) + 2/(1+s) x^(1+s)       for |t|^th <= x <= 1
/// with q = beta + k - alpha > 0 and s = (q th - beta)/(k th).
struct CounterexampleProfile {
  double theta;
  double sigma;
  double q;

  /// Requires the sub regime and q theta > max(1, beta). A non-positive theta
  /// selects theta = (2 + beta)/q.
  static CounterexampleProfile make(const FlowParams& p, double theta = -1.0) {
    const double q = p.beta + p.k - p.alpha;
    if (!(q > 0.0)) throw std::domain_error("CounterexampleProfile: requires alpha < beta + k");
    if (theta <= 0.0) theta = (2.0 + p.beta) / q;
    if (!(q * theta > std::max(1.0, p.beta)))
      throw std::domain_error("CounterexampleProfile: need q*theta > max(1, beta)");
    return {theta, (q * theta - p.beta) / (p.k * theta), q};
  }
};

inline double counterexample_phi(double x, double t, const CounterexampleProfile& prof) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("counterexample_phi: x must lie in [0, 1]");
  if (!(t >= -1.0 && t < 0.0)) throw std::domain_error("counterexample_phi: t must lie in [-1, 0)");
  const double th = prof.theta;
  const double s = prof.sigma;
  const double at = std::abs(t);
  const double edge = std::pow(at, th);
  if (x < edge) return -edge + std::pow(at, -th + s * th) * x * x;
  return -edge - (1.0 - s) / (1.0 + s) * std::pow(at, th * (1.0 + s)) + 2.0 / (1.0 + s) * std::pow(x, 1.0 + s);
}

/// x-derivative of counterexample_phi.
inline double counterexample_dphi(double x, double t, const CounterexampleProfile& prof) {
  const double at = std::abs(t);
  const double edge = std::pow(at, prof.theta);
  if (x < edge) return 2.0 * std::pow(at, prof.sigma * prof.theta - prof.theta) * x;
  return 2.0 * std::pow(x, prof.sigma);
}

/// Centred sphere of radius a0.
inline RadialField sphere_initial(const Grid& g, double a0) {
  if (!(a0 > 0.0)) throw std::domain_error("sphere_initial: radius must be > 0");
  return RadialField::constant(g, std::log(a0));
}

/// Prolate ellipsoid of revolution with semi-axis `aspect` along theta = 0 and
/// 1 across it: phi = -log(cos^2 / aspect^2 + sin^2) / 2.
inline RadialField elongated_initial(const Grid& g, double aspect) {
  if (!(aspect > 1.0)) throw std::domain_error("elongated_initial: aspect must be > 1");
  std::vector<double> v(g.size());
  const double b2 = aspect * aspect;
  for (int i = 0; i < g.size(); ++i) {
    const double c = std::cos(g.theta(i));
    const double s = std::sin(g.theta(i));
    v[i] = -0.5 * std::log(c * c / b2 + s * s);
  }
  return RadialField(g, std::move(v));
}

}  // namespace anisoflow
