/// \file
/// One-dimensional discretizations of S^n and reconstruction of the radial
/// graph geometry from phi = log r.
///
/// Two grids are supported:
///  * periodic circle (n = 1): theta_i = i h, h = 2 pi / m, indices mod m;
///  * axisymmetric polar (n >= 2): theta_i = (i + 1/2) h, h = pi / m, the
///    polar angle of a rotationally symmetric hypersurface. Poles are cell
///    faces, never nodes. Ghost values mirror across each pole
///    (phi_{-1} = phi_0, phi_m = phi_{m-1}), which is exact for data that are
///    even about the pole and forces phi'(0) = phi'(pi) = 0.

#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "anisoflow/params.hpp"
#include "anisoflow/symfun.hpp"

namespace anisoflow {

enum class GridKind { periodic_circle, axisym_polar };

inline const char* to_string(GridKind k) {
  return k == GridKind::periodic_circle ? "periodic-circle" : "axisym-polar";
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "periodic-circle") return GridKind::periodic_circle;
  if (s == "axisym-polar") return GridKind::axisym_polar;
  throw std::invalid_argument("unknown grid kind '" + s + "'");
}

class Grid {
 public:
  Grid(GridKind kind, int m) : kind_(kind), m_(m) {
    if (m < 8) throw std::invalid_argument("Grid: need at least 8 nodes, got " + std::to_string(m));
    h_ = kind == GridKind::periodic_circle ? 2.0 * std::numbers::pi / m : std::numbers::pi / m;
    auto c = std::make_shared<std::vector<double>>(m);
    auto e = std::make_shared<std::vector<char>>(m);
    for (int i = 0; i < m; ++i) {
      const double s = std::sin(theta(i));
      (*e)[i] = std::abs(s) < std::sin(0.25 * h_);
      (*c)[i] = (*e)[i] ? 0.0 : std::cos(theta(i)) / s;
    }
    cot_ = std::move(c);
    near_pole_ = std::move(e);
  }

  /// Grid matching the ambient dimension: circle for n = 1, polar otherwise.
  static Grid for_dimension(int n, int m) {
    return Grid(n == 1 ? GridKind::periodic_circle : GridKind::axisym_polar, m);
  }

  GridKind kind() const { return kind_; }
  int size() const { return m_; }
  double spacing() const { return h_; }

  double theta(int i) const {
    return kind_ == GridKind::periodic_circle ? i * h_ : (i + 0.5) * h_;
  }

  std::vector<double> nodes() const {
    std::vector<double> t(m_);
    for (int i = 0; i < m_; ++i) t[i] = theta(i);
    return t;
  }

  /// Neighbour index with boundary handling (wraparound or pole mirror).
  int wrap(int i) const {
    if (kind_ == GridKind::periodic_circle) return ((i % m_) + m_) % m_;
    if (i < 0) return -i - 1;
    if (i >= m_) return 2 * m_ - i - 1;
    return i;
  }

  /// cot(theta_i), and whether node i is close enough to a pole that
  /// transverse_hessian takes its Taylor branch.
  double cot(int i) const { return (*cot_)[i]; }
  bool near_pole(int i) const { return (*near_pole_)[i] != 0; }

  bool operator==(const Grid& o) const { return kind_ == o.kind_ && m_ == o.m_; }

 private:
  GridKind kind_;
  int m_;
  double h_;
  std::shared_ptr<const std::vector<double>> cot_;
  std::shared_ptr<const std::vector<char>> near_pole_;
};

/// phi = log r sampled on a grid at one instant.
struct RadialField {
  Grid grid;
  std::vector<double> phi;

  RadialField(Grid g, std::vector<double> values) : grid(g), phi(std::move(values)) {
    if (static_cast<int>(phi.size()) != grid.size())
      throw std::invalid_argument("RadialField: value count does not match grid");
  }

  static RadialField constant(Grid g, double value) {
    return RadialField(g, std::vector<double>(g.size(), value));
  }

  template <class Fn>
  static RadialField from_radius(Grid g, Fn&& r_of_theta) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = std::log(r_of_theta(g.theta(i)));
    return RadialField(g, std::move(v));
  }

  bool all_finite() const {
    for (double v : phi)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Central first difference of phi.
inline std::vector<double> d1(const RadialField& f) {
  const Grid& g = f.grid;
  const int m = g.size();
  const double inv = 0.5 / g.spacing();
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = (f.phi[g.wrap(i + 1)] - f.phi[g.wrap(i - 1)]) * inv;
  return out;
}

/// Central second difference of phi.
inline std::vector<double> d2(const RadialField& f) {
  const Grid& g = f.grid;
  const int m = g.size();
  const double inv = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i)
    out[i] = (f.phi[g.wrap(i + 1)] - 2.0 * f.phi[i] + f.phi[g.wrap(i - 1)]) * inv;
  return out;
}

/// Per-node geometry of the radial graph. Principal curvatures are stored as
/// the meridian value and (axisymmetric only) the rotational value, which has
/// multiplicity n - 1.
struct GeometryState {
  FlowParams params;
  Grid grid;
  std::vector<double> r, dphi, ddphi, rho, u;
  std::vector<double> kappa_mer, kappa_rot;
  std::vector<double> sigma_k, F, Phi;
  std::vector<double> sigma_k_minus_mer;  ///< sigma_{k-1}(kappa | meridian) = d sigma_k / d kappa_mer
  std::vector<double> cone_margin;        ///< min_{1<=j<=k} sigma_j at each node
  std::vector<int> cone_order;            ///< largest m <= k with kappa in Gamma_m^+ (within tolerance)

  int size() const { return grid.size(); }

  /// Full principal curvature vector (length n) at node i; meridian first.
  std::vector<double> kappa(int i) const {
    std::vector<double> kv(params.n, kappa_rot.empty() ? 0.0 : kappa_rot[i]);
    kv[0] = kappa_mer[i];
    return kv;
  }
};

/// phi' cot(theta) with the removable singularity at the poles handled by a
/// Taylor fallback (phi' cot theta -> phi'' as theta -> 0 or pi).
inline double transverse_hessian(double theta, double dphi, double ddphi, double h) {
  const double s = std::sin(theta);
  if (std::abs(s) < std::sin(0.25 * h)) return ddphi;
  return dphi * std::cos(theta) / s;
}

/// sigma_j of (a, b, ..., b) with b repeated n - 1 times, without allocating.
inline double axisym_sigma(int j, int n, double a, double b) {
  if (j == 0) return 1.0;
  if (j > n) return 0.0;
  return binomial(n - 1, j) * std::pow(b, j) + a * binomial(n - 1, j - 1) * std::pow(b, j - 1);
}

/// Reconstruct r, rho, u, principal curvatures, sigma_k, F and Phi.
///
/// With one angular variable the Weingarten map
///   h_i^j = (delta_ij - phi_ij + phi_i^l phi_l phi_j / rho^2) / (r rho)
/// is diagonal. The spherical covariant Hessian of phi(theta) has meridian
/// entry phi'' and transverse entries phi' cot(theta), giving
///   kappa_mer = (1 - phi'' / rho^2) / (r rho),
///   kappa_rot = (1 - phi' cot(theta)) / (r rho).
///
/// `cone_order` records the largest m <= k with sigma_j > tol_j for all j <= m,
/// where tol_j = cone_tol, or default_cone_tol when cone_tol < 0. Nodes below
/// order k get F = Phi = NaN; enforcing the cone is the caller's job.
inline GeometryState geometry(const RadialField& field, const FlowParams& params,
                              double cone_tol = -1.0) {
  const Grid& g = field.grid;
  const bool circle = g.kind() == GridKind::periodic_circle;
  if (circle != (params.n == 1))
    throw std::invalid_argument("geometry: grid kind " + std::string(to_string(g.kind())) +
                                " does not match n = " + std::to_string(params.n));
  const int m = g.size();
  GeometryState s{params, g, {}, d1(field), d2(field), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  s.r.resize(m);
  s.rho.resize(m);
  s.u.resize(m);
  s.kappa_mer.resize(m);
  if (!circle) s.kappa_rot.resize(m);
  s.sigma_k.resize(m);
  s.sigma_k_minus_mer.resize(m);
  s.F.resize(m);
  s.Phi.resize(m);
  s.cone_margin.resize(m);
  s.cone_order.resize(m);

  const int n = params.n;
  const int k = params.k;
  const double inv_beta = 1.0 / params.beta;
  const double ab = params.alpha / params.beta;
  // sigma_j(a, b, ..., b) = C(n-1, j) b^j + C(n-1, j-1) a b^(j-1)
  std::vector<double> c0(k + 1), c1(k + 1);
  for (int j = 0; j <= k; ++j) {
    c0[j] = binomial(n - 1, j);
    c1[j] = binomial(n - 1, j - 1);
  }
  for (int i = 0; i < m; ++i) {
    const double r = std::exp(field.phi[i]);
    const double dp = s.dphi[i];
    const double rho = std::sqrt(1.0 + dp * dp);
    const double w = 1.0 / (r * rho);
    s.r[i] = r;
    s.rho[i] = rho;
    s.u[i] = r / rho;
    const double a = w * (1.0 - s.ddphi[i] / (rho * rho));
    double b = 0.0;
    if (!circle) b = w * (1.0 - (g.near_pole(i) ? s.ddphi[i] : dp * g.cot(i)));
    s.kappa_mer[i] = a;
    if (!circle) s.kappa_rot[i] = b;
    const double scale = 1.0 + std::max(std::abs(a), std::abs(b));
    double margin = std::numeric_limits<double>::infinity();
    int order = 0;
    bool inside = true;
    double bprev = 1.0, tolj = 1.0;  // b^(j-1), (1 + |kappa|_inf)^j
    for (int j = 1; j <= k; ++j) {
      const double bj = bprev * b;
      tolj *= scale;
      const double sj = c0[j] * bj + c1[j] * a * bprev;
      margin = std::min(margin, sj);
      const double tol = cone_tol < 0.0 ? 1e-12 * tolj : cone_tol;
      inside = inside && sj > tol;
      if (inside) order = j;
      if (j == k) {
        s.sigma_k[i] = sj;
        s.sigma_k_minus_mer[i] = c1[k] * bprev;
      }
      bprev = bj;
    }
    s.cone_margin[i] = margin;
    s.cone_order[i] = order;
    if (order == k) {
      s.F[i] = inv_beta == 1.0 ? s.sigma_k[i] : std::pow(s.sigma_k[i], inv_beta);
      s.Phi[i] = std::exp(ab * field.phi[i]) * s.F[i];
    } else {
      s.F[i] = s.Phi[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return s;
}

}  // namespace anisoflow
