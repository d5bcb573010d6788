/// \file
/// The property and oracle suite behind `anisoflow verify`, also reused by the
/// acceptance binary. Each check returns one row of the pass/fail table.
///
/// Fault injection: a row whose name equals VerifyOptions::fault perturbs the
/// implementation-side value it checks, so the row must fail. The CLI sets it
/// from ANISOFLOW_VERIFY_FAULT.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "anisoflow/check/oracles.hpp"
#include "anisoflow/check/sampling.hpp"
#include "anisoflow/flow_engine.hpp"
#include "anisoflow/grid_geom.hpp"
#include "anisoflow/reference.hpp"
#include "anisoflow/symfun.hpp"

namespace anisoflow::check {

struct CheckRow {
  std::string name;
  bool passed = false;
  int samples = 0;
  int failures = 0;
  double worst = 0.0;  ///< worst normalized violation (or error) seen
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  int samples = 1000;
  std::string fault;
};

namespace detail {

inline double rel_scale(std::initializer_list<double> xs) {
  double s = 1.0;
  for (double x : xs) s = std::max(s, std::abs(x));
  return s;
}

// Shared loop: `body` returns the normalized violation of one sample (> 0 fails).
inline CheckRow property_row(const std::string& name, int samples,
                             const std::function<double()>& body) {
  CheckRow row{name, true, samples, 0, 0.0, {}};
  for (int s = 0; s < samples; ++s) {
    const double v = body();
    if (v > 0.0 || !std::isfinite(v)) {
      ++row.failures;
      if (!std::isfinite(v)) row.worst = v;
      else row.worst = std::max(row.worst, v);
    }
  }
  row.passed = row.failures == 0;
  std::ostringstream os;
  os << row.failures << "/" << samples << " failures";
  row.detail = os.str();
  return row;
}

inline int pick(CurvatureSampler& rng, int lo, int hi) {
  return std::min(hi, lo + static_cast<int>(rng.uniform(0.0, 1.0) * (hi - lo + 1)));
}

}  // namespace detail

inline CheckRow check_identity_deleted(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 1);
  const bool fault = o.fault == "identity_deleted";
  return detail::property_row("identity_deleted", o.samples, [&] {
    const int n = detail::pick(rng, 1, 6);
    std::vector<double> k(n);
    for (double& v : k) v = rng.uniform(-3.0, 3.0);
    double worst = -1.0;
    for (int m = 1; m <= n; ++m)
      for (int i = 0; i < n; ++i) {
        const std::size_t ex[] = {static_cast<std::size_t>(i)};
        const double lhs = sigma(m, k) * (fault ? 1.001 : 1.0);
        const double a = sigma_deleted(m, k, ex);
        const double b = k[i] * sigma_deleted(m - 1, k, ex);
        worst = std::max(worst, std::abs(lhs - a - b) / detail::rel_scale({lhs, a, b}) - 1e-10);
      }
    return worst;
  });
}

inline CheckRow check_newton_maclaurin(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 2);
  const bool fault = o.fault == "newton_maclaurin";
  return detail::property_row("newton_maclaurin", o.samples, [&] {
    const int n = detail::pick(rng, 2, 6);
    const int m = detail::pick(rng, 2, n);
    const auto k = rng.in_cone(n, m);
    const double lhs = sigma(m, k) * sigma(m - 2, k) * (fault ? 2.0 : 1.0);
    const double c = (m - 1.0) * (n - m + 1.0) / (m * (n - m + 2.0));
    const double rhs = c * sigma(m - 1, k) * sigma(m - 1, k);
    return (lhs - rhs) / detail::rel_scale({lhs, rhs}) - 1e-12;
  });
}

inline CheckRow check_maclaurin_chain(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 3);
  const bool fault = o.fault == "maclaurin_chain";
  return detail::property_row("maclaurin_chain", o.samples, [&] {
    const int n = detail::pick(rng, 1, 6);
    const int m = detail::pick(rng, 1, n);
    const auto k = rng.in_cone(n, m);
    const double top = std::pow(sigma(m, k) / binomial(n, m), 1.0 / m) * (fault ? 1.5 : 1.0);
    double worst = -1.0;
    for (int l = 1; l <= m; ++l) {
      const double low = std::pow(sigma(l, k) / binomial(n, l), 1.0 / l);
      worst = std::max(worst, (top - low) / detail::rel_scale({top, low}) - 1e-12);
    }
    return worst;
  });
}

inline CheckRow check_identity_squares(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 4);
  const bool fault = o.fault == "identity_squares";
  return detail::property_row("identity_squares", o.samples, [&] {
    const int n = detail::pick(rng, 1, 6);
    std::vector<double> k(n);
    for (double& v : k) v = rng.uniform(-3.0, 3.0);
    double worst = -1.0;
    for (int m = 1; m <= n; ++m) {
      const auto g = sigma_gradient(m, k);
      double lhs = 0.0;
      for (int i = 0; i < n; ++i) lhs += g[i] * k[i] * k[i];
      if (fault) lhs += 0.01 * detail::rel_scale({lhs});
      const double rhs = sigma(1, k) * sigma(m, k) - (m + 1.0) * sigma(m + 1, k);
      const double scale = detail::rel_scale({lhs, rhs, sigma(1, k) * sigma(m, k)});
      worst = std::max(worst, std::abs(lhs - rhs) / scale - 1e-10);
    }
    return worst;
  });
}

inline CheckRow check_largest_entry(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 5);
  const bool fault = o.fault == "largest_entry";
  return detail::property_row("largest_entry", o.samples, [&] {
    const int n = detail::pick(rng, 1, 6);
    const int m = detail::pick(rng, 1, n);
    const auto k = rng.in_cone(n, m);  // non-increasing, so k[0] is the largest
    const std::size_t ex[] = {0};
    const double lhs = k[0] * sigma_deleted(m - 1, k, ex) * (fault ? 0.0 : 1.0);
    const double rhs = static_cast<double>(m) / n * sigma(m, k);
    return (rhs - lhs) / detail::rel_scale({lhs, rhs}) - 1e-12;
  });
}

inline CheckRow check_root_concavity(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 6);
  const bool fault = o.fault == "root_concavity";
  return detail::property_row("root_concavity", o.samples, [&] {
    const int n = detail::pick(rng, 1, 6);
    const int m = detail::pick(rng, 1, n);
    const auto a = rng.in_cone(n, m);
    const auto b = rng.in_cone(n, m);
    const double lam = rng.uniform(0.0, 1.0);
    std::vector<double> mix(n);
    for (int i = 0; i < n; ++i) mix[i] = lam * a[i] + (1 - lam) * b[i];
    auto root = [m](const std::vector<double>& v) { return std::pow(sigma(m, v), 1.0 / m); };
    const double lhs = root(mix) * (fault ? 0.5 : 1.0);
    const double rhs = lam * root(a) + (1 - lam) * root(b);
    return (rhs - lhs) / detail::rel_scale({lhs, rhs}) - 1e-12;
  });
}

/// Hessian-form upper bound on Gamma_k^+, k in {2,3}, n in {3,4,5}.
inline CheckRow check_hessian_bound(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 7);
  const bool fault = o.fault == "hessian_bound";
  return detail::property_row("hessian_bound", o.samples, [&] {
    const int n = detail::pick(rng, 3, 5);
    const int k = detail::pick(rng, 2, 3);
    const auto kap = rng.in_cone(n, k);
    const auto eta = rng.symmetric(n);
    double q = sigma_hessian_form(k, kap, eta);
    const double bound = sigma_hessian_upper_bound(k, kap, eta);
    if (fault) q = bound + 0.1 * detail::rel_scale({bound});
    return (q - bound) / detail::rel_scale({q, bound}) - 1e-10;
  });
}

/// Inverse-concavity inequality for sigma_k^{1/k} on the positive cone.
inline CheckRow check_inverse_concavity(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 8);
  const bool fault = o.fault == "inverse_concavity";
  return detail::property_row("inverse_concavity", o.samples, [&] {
    const int k = detail::pick(rng, 2, 3);
    const int n = detail::pick(rng, k, 5);
    const auto kap = rng.in_cone(n, n);
    const auto eta = rng.symmetric(n);
    auto t = inverse_concavity_terms(k, kap, eta);
    if (fault) t.lhs = t.rhs - 0.1 * detail::rel_scale({t.rhs});
    return (t.rhs - t.lhs) / detail::rel_scale({t.lhs, t.rhs}) - 1e-10;
  });
}

inline CheckRow check_gradient_fd(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 9);
  const bool fault = o.fault == "gradient_fd";
  return detail::property_row("gradient_fd", std::min(o.samples, 300), [&] {
    const int n = detail::pick(rng, 1, 6);
    const int m = detail::pick(rng, 1, n);
    std::vector<double> k(n);
    for (double& v : k) v = rng.uniform(-2.0, 2.0);
    const auto g = sigma_gradient(m, k);
    double worst = -1.0;
    for (int i = 0; i < n; ++i) {
      const double fd = fd_sigma_partial(m, k, i);
      const double val = g[i] + (fault ? 1e-3 : 0.0);
      worst = std::max(worst, std::abs(val - fd) / detail::rel_scale({fd}) - 1e-8);
    }
    return worst;
  });
}

inline CheckRow check_hessian_fd(const VerifyOptions& o) {
  CurvatureSampler rng(o.seed + 10);
  const bool fault = o.fault == "hessian_fd";
  return detail::property_row("hessian_fd", std::min(o.samples, 300), [&] {
    const int n = detail::pick(rng, 2, 5);
    const int k = detail::pick(rng, 2, n);
    const auto kap = rng.in_cone(n, k);
    const auto eta = rng.symmetric(n);
    const double q = sigma_hessian_form(k, kap, eta) * (fault ? 1.01 : 1.0);
    const double fd = fd_sigma_hessian_form(k, kap, eta);
    const double qg = root_sigma_hessian_form(k, kap, eta);
    const double fdg = fd_root_sigma_hessian_form(k, kap, eta);
    return std::max(std::abs(q - fd) / detail::rel_scale({fd}) - 1e-6,
                    std::abs(qg - fdg) / detail::rel_scale({fdg}) - 1e-6);
  });
}

/// Max curvature error against an oracle on r = 1 + 0.3 cos(theta) for
/// m in {64, 128, 256}, plus the observed orders.
struct GeometryConvergence {
  std::vector<int> m;
  std::vector<double> errors;
  std::vector<double> orders;
};

inline double test_profile(double t) { return 1.0 + 0.3 * std::cos(t); }

inline GeometryConvergence polar_curve_convergence(double fault_scale = 0.0) {
  GeometryConvergence gc;
  const FlowParams p = FlowParams::make(1, 1, 2.0, 1.0);
  for (int m : {64, 128, 256}) {
    const Grid g(GridKind::periodic_circle, m);
    const auto s = geometry(RadialField::from_radius(g, test_profile), p);
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = g.theta(i);
      const double exact = polar_curve_curvature(test_profile(t), -0.3 * std::sin(t), -0.3 * std::cos(t));
      err = std::max(err, std::abs(s.kappa_mer[i] * (1.0 + fault_scale) - exact));
    }
    gc.m.push_back(m);
    gc.errors.push_back(err);
  }
  gc.orders = observed_orders(gc.errors);
  return gc;
}

inline GeometryConvergence embedding_convergence(int n = 2, double fault_scale = 0.0) {
  GeometryConvergence gc;
  const FlowParams p = FlowParams::make(n, 1, 2.0, 1.0);
  for (int m : {64, 128, 256}) {
    const Grid g(GridKind::axisym_polar, m);
    const auto s = geometry(RadialField::from_radius(g, test_profile), p);
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto ref = embedding_curvatures(test_profile, g.theta(i));
      err = std::max(err, std::abs(s.kappa_mer[i] - ref.meridian));
      err = std::max(err, std::abs(s.kappa_rot[i] * (1.0 + fault_scale) - ref.rotational));
    }
    gc.m.push_back(m);
    gc.errors.push_back(err);
  }
  gc.orders = observed_orders(gc.errors);
  return gc;
}

inline CheckRow convergence_row(const std::string& name, const GeometryConvergence& gc, double min_order) {
  CheckRow row{name, true, static_cast<int>(gc.m.size()), 0, 0.0, {}};
  std::ostringstream os;
  os.precision(3);
  os << "err@256=" << gc.errors.back() << " orders=";
  for (double o : gc.orders) {
    os << o << " ";
    if (!(o >= min_order)) {
      row.passed = false;
      ++row.failures;
    }
  }
  row.worst = gc.errors.back();
  row.detail = os.str();
  return row;
}

inline CheckRow check_polar_curve(const VerifyOptions& o) {
  return convergence_row("geometry_polar_curve",
                         polar_curve_convergence(o.fault == "geometry_polar_curve" ? 1e-3 : 0.0), 1.9);
}

inline CheckRow check_embedding(const VerifyOptions& o) {
  return convergence_row("geometry_embedding",
                         embedding_convergence(2, o.fault == "geometry_embedding" ? 1e-3 : 0.0), 1.9);
}

/// Closed-form sphere radii against fine RK4 integration of the sphere ODE.
inline CheckRow check_sphere_closed_form(const VerifyOptions& o) {
  const bool fault = o.fault == "sphere_closed_form";
  CheckRow row{"sphere_closed_form", true, 0, 0, 0.0, {}};
  const FlowParams sets[] = {FlowParams::make(2, 1, 3.0, 1.0), FlowParams::make(2, 2, 4.0, 2.0),
                             FlowParams::make(3, 2, 5.5, 1.5), FlowParams::make(2, 1, 2.0, 1.0)};
  for (const auto& p : sets) {
    for (double a0 : {0.5, 2.0}) {
      const SphereSolution sol(a0, p);
      const double g = p.gamma();
      const double e = (p.alpha - p.k) / p.beta;
      auto norm = [&](double, double a) { return g * (a - std::pow(a, e)); };
      auto unnorm = [&](double, double a) { return -g * std::pow(a, e); };
      for (double t : {1.0, 2.5, 5.0}) {
        ++row.samples;
        const double ref_n = integrate_ode(norm, a0, t, 20000);
        const double ref_u = integrate_ode(unnorm, a0, t, 20000);
        const double got_n = sphere_radius(t, sol, FlowMode::normalized) * (fault ? 1.0 + 1e-6 : 1.0);
        const double got_u = sphere_radius(t, sol, FlowMode::unnormalized);
        const double err = std::max(std::abs(got_n - ref_n) / ref_n, std::abs(got_u - ref_u) / ref_u);
        row.worst = std::max(row.worst, err);
        if (!(err < 1e-10)) ++row.failures;
      }
    }
  }
  row.passed = row.failures == 0;
  std::ostringstream os;
  os << "max rel err " << row.worst;
  row.detail = os.str();
  return row;
}

/// dtau/dt = phi(t)^q' (including 1 at t = 0), checked by central differences.
inline CheckRow check_time_maps(const VerifyOptions& o) {
  const bool fault = o.fault == "time_maps";
  CheckRow row{"time_maps", true, 0, 0, 0.0, {}};
  const FlowParams sets[] = {FlowParams::make(2, 1, 3.0, 1.0), FlowParams::make(2, 1, 2.0, 1.0),
                             FlowParams::make(2, 1, 1.5, 1.0), FlowParams::make(2, 2, 5.0, 2.0)};
  for (const auto& p : sets) {
    for (double t : {0.0, 0.1, 0.7}) {
      ++row.samples;
      const double h = 1e-6;
      const double lo = std::max(0.0, t - h);
      const double dtau = (tau(t + h, p) - tau(lo, p)) / (t + h - lo);
      const double expect = std::pow(rescale_factor(t, p), p.excess()) * (fault ? 1.01 : 1.0);
      const double err = std::abs(dtau - expect) / expect;
      row.worst = std::max(row.worst, err);
      if (!(err < (t == 0.0 ? 1e-5 : 1e-7))) ++row.failures;
    }
  }
  row.passed = row.failures == 0;
  std::ostringstream os;
  os << "max rel err " << row.worst;
  row.detail = os.str();
  return row;
}

/// Largest pointwise gap between the normalized run and the unnormalized run
/// mapped through (rescale_factor, tau), both landed exactly on the same
/// normalized times.
inline double normalization_gap(const FlowParams& p, const RadialField& init, double tau_end, int samples,
                                double cfl = 0.2) {
  StepperConfig cfg;
  cfg.cfl = cfl;
  RadialField fn = init, fu = init;
  double sn = 0.0, tu = 0.0, worst = 0.0;
  for (int j = 1; j <= samples; ++j) {
    const double s_target = tau_end * j / samples;
    const double t_target = tau_inverse(s_target, p);
    while (sn < s_target - 1e-14) {
      auto r = step(fn, p, cfg, FlowMode::normalized, sn, s_target - sn);
      fn = std::move(r.field);
      sn += r.dt;
    }
    while (tu < t_target - 1e-14) {
      auto r = step(fu, p, cfg, FlowMode::unnormalized, tu, t_target - tu);
      fu = std::move(r.field);
      tu += r.dt;
    }
    const double shift = std::log(rescale_factor(tu, p));
    for (std::size_t i = 0; i < fn.phi.size(); ++i) {
      const double rn = std::exp(fn.phi[i]);
      const double ru = std::exp(fu.phi[i] - shift);
      worst = std::max(worst, std::abs(rn - ru));
    }
  }
  return worst;
}

inline CheckRow check_normalization(const VerifyOptions& o) {
  const bool fault = o.fault == "normalization";
  CheckRow row{"normalization", true, 2, 0, 0.0, {}};
  const Grid g(GridKind::axisym_polar, 64);
  const auto init = elongated_initial(g, 1.5);
  const double gs = std::max(normalization_gap(FlowParams::make(2, 1, 3.0, 1.0), init, 0.3, 3),
                             normalization_gap(FlowParams::make(2, 1, 2.0, 1.0), init, 0.3, 3));
  row.worst = gs + (fault ? 1e-3 : 0.0);
  row.passed = row.worst < 1e-5;
  row.failures = row.passed ? 0 : 1;
  std::ostringstream os;
  os << "max |r_norm - r_unnorm/phi| = " << row.worst;
  row.detail = os.str();
  return row;
}

/// phi -> phi + log(lambda) scales r and u by lambda, curvatures by 1/lambda,
/// and leaves rho alone.
inline CheckRow check_scaling(const VerifyOptions& o) {
  const bool fault = o.fault == "geometry_scaling";
  CheckRow row{"geometry_scaling", true, 0, 0, 0.0, {}};
  const FlowParams p = FlowParams::make(2, 2, 4.0, 2.0);
  const Grid g(GridKind::axisym_polar, 64);
  const auto base = elongated_initial(g, 1.4);
  const auto s0 = geometry(base, p);
  for (double lam : {0.5, 2.0, 3.0}) {
    auto f = base;
    for (double& v : f.phi) v += std::log(lam);
    const auto s1 = geometry(f, p);
    for (int i = 0; i < g.size(); ++i) {
      ++row.samples;
      const double km = s1.kappa_mer[i] * (fault ? 1.01 : 1.0);
      const double e = std::max({std::abs(s1.r[i] - lam * s0.r[i]) / (lam * s0.r[i]),
                                 std::abs(s1.u[i] - lam * s0.u[i]) / (lam * s0.u[i]),
                                 std::abs(s1.rho[i] - s0.rho[i]),
                                 std::abs(km * lam - s0.kappa_mer[i]) / std::abs(s0.kappa_mer[i]),
                                 std::abs(s1.kappa_rot[i] * lam - s0.kappa_rot[i]) / std::abs(s0.kappa_rot[i])});
      row.worst = std::max(row.worst, e);
      if (!(e < 1e-12)) ++row.failures;
    }
  }
  row.passed = row.failures == 0;
  std::ostringstream os;
  os << "max rel err " << row.worst;
  row.detail = os.str();
  return row;
}

inline std::vector<CheckRow> run_verify_suite(const VerifyOptions& o) {
  return {check_identity_deleted(o), check_newton_maclaurin(o), check_maclaurin_chain(o),
          check_identity_squares(o), check_largest_entry(o),    check_root_concavity(o),
          check_hessian_bound(o),    check_inverse_concavity(o), check_gradient_fd(o),
          check_hessian_fd(o),       check_polar_curve(o),      check_embedding(o),
          check_scaling(o),          check_sphere_closed_form(o), check_time_maps(o),
          check_normalization(o)};
}

}  // namespace anisoflow::check
