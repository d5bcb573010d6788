/// \file
/// Independent reference computations used by the test suites and `verify`.
/// Nothing in the core library includes this header; each routine here takes
/// a different route from the code it checks (subset enumeration, principal
/// minors, embedding finite differences, fine-step ODE integration).

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "anisoflow/symfun.hpp"

namespace anisoflow::check {

/// sigma_m by enumerating all m-subsets.
inline double brute_force_sigma(int m, std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  if (m == 0) return 1.0;
  if (m > n) return 0.0;
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= kappa[i];
    total += prod;
  }
  return total;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

/// sigma_k of a (not necessarily symmetric) matrix: sum of k x k principal minors.
inline double principal_minor_sigma(int k, const SquareMatrix& a) {
  const int n = static_cast<int>(a.size());
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  double total = 0.0;
  std::vector<int> idx;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    idx.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    std::vector<double> sub(static_cast<std::size_t>(k * k));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub[r * k + c] = a(idx[r], idx[c]);
    total += determinant(std::move(sub), k);
  }
  return total;
}

inline SquareMatrix diag_plus(std::span<const double> kappa, const SquareMatrix& eta, double s) {
  SquareMatrix a = SquareMatrix::diagonal(kappa);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) a(i, j) += s * eta(i, j);
  return a;
}

/// d^2/ds^2 sigma_k(diag(kappa) + s eta) at s = 0, fourth-order central differences.
inline double fd_sigma_hessian_form(int k, std::span<const double> kappa, const SquareMatrix& eta,
                                    double step = 1e-3) {
  auto f = [&](double s) { return principal_minor_sigma(k, diag_plus(kappa, eta, s)); };
  return (-f(2 * step) + 16 * f(step) - 30 * f(0.0) + 16 * f(-step) - f(-2 * step)) / (12 * step * step);
}

/// d^2/ds^2 sigma_k(diag(kappa) + s eta)^(1/k) at s = 0.
inline double fd_root_sigma_hessian_form(int k, std::span<const double> kappa, const SquareMatrix& eta,
                                         double step = 1e-3) {
  auto f = [&](double s) { return std::pow(principal_minor_sigma(k, diag_plus(kappa, eta, s)), 1.0 / k); };
  return (-f(2 * step) + 16 * f(step) - 30 * f(0.0) + 16 * f(-step) - f(-2 * step)) / (12 * step * step);
}

/// Central difference of brute_force_sigma along coordinate i.
inline double fd_sigma_partial(int m, std::span<const double> kappa, std::size_t i, double step = 1e-5) {
  std::vector<double> kp(kappa.begin(), kappa.end()), km(kappa.begin(), kappa.end());
  kp[i] += step;
  km[i] -= step;
  return (brute_force_sigma(m, kp) - brute_force_sigma(m, km)) / (2 * step);
}

/// Curvature of a plane polar curve r(theta):
///   (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^(3/2).
inline double polar_curve_curvature(double r, double dr, double ddr) {
  return (r * r + 2 * dr * dr - r * ddr) / std::pow(r * r + dr * dr, 1.5);
}

struct EmbeddedCurvatures {
  double meridian;
  double rotational;
};

/// Principal curvatures of the hypersurface of revolution whose meridian is
/// (x, z) = r(theta) (sin theta, cos theta), from finite differences of the
/// embedding itself (outward normal convention). The rotational curvature is
/// N_x / x, the normal's distance-from-axis component over the radius of the
/// parallel circle. For n = 1 only the meridian value is meaningful.
inline EmbeddedCurvatures embedding_curvatures(const std::function<double(double)>& r, double theta,
                                               double step = 1e-3) {
  auto X = [&](double t) { return std::array<double, 2>{r(t) * std::sin(t), r(t) * std::cos(t)}; };
  const auto p = X(theta + step), c = X(theta), q = X(theta - step);
  const auto p2 = X(theta + 2 * step), q2 = X(theta - 2 * step);
  double d1[2], d2[2];
  for (int j = 0; j < 2; ++j) {
    d1[j] = (-p2[j] + 8 * p[j] - 8 * q[j] + q2[j]) / (12 * step);
    d2[j] = (-p2[j] + 16 * p[j] - 30 * c[j] + 16 * q[j] - q2[j]) / (12 * step * step);
  }
  const double speed = std::hypot(d1[0], d1[1]);
  const double cross = d1[0] * d2[1] - d1[1] * d2[0];
  const double mer = -cross / (speed * speed * speed);
  const double nx = -d1[1] / speed;
  const double rot = nx / c[0];
  return {mer, rot};
}

/// Classical RK4 on a scalar ODE with a fixed number of substeps.
inline double integrate_ode(const std::function<double(double, double)>& f, double y0, double t_end,
                            int steps) {
  const double h = t_end / steps;
  double y = y0, t = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

/// log2 ratios of successive errors: observed convergence orders.
inline std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

}  // namespace anisoflow::check
