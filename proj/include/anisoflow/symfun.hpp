/// \file
/// Elementary symmetric polynomials of principal curvatures, their first and
/// second derivatives at diagonal points, and Garding cone membership.
///
/// Index convention: every index in this header is 0-based. Curvature
/// kappa[i] corresponds to the 1-based kappa_{i+1} of the usual notation, so
/// "the largest curvature kappa_1" of a non-increasing vector is kappa[0].

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisoflow {

/// Dense row-major square matrix; just enough for the quadratic forms below.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static SquareMatrix diagonal(std::span<const double> d) {
    SquareMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Binomial coefficient C(n, m) as a double (0 outside 0 <= m <= n).
inline double binomial(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  double c = 1.0;
  for (int j = 1; j <= m; ++j) c = c * static_cast<double>(n - m + j) / j;
  return c;
}

namespace detail {

// Running table e[j] = sigma_j of the entries seen so far. Entries flagged in
// `skip` are treated as zero, i.e. they do not contribute.
inline std::vector<double> sigma_table(std::span<const double> kappa, int top,
                                       std::span<const std::size_t> skip = {}) {
  std::vector<double> e(static_cast<std::size_t>(top) + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    const double x = kappa[i];
    for (int j = top; j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

inline void check_order(int m) {
  if (m < 0) throw std::domain_error("sigma: negative order " + std::to_string(m));
}

}  // namespace detail

/// sigma_m(kappa). sigma_0 = 1 and sigma_m = 0 for m > n.
inline double sigma(int m, std::span<const double> kappa) {
  detail::check_order(m);
  if (static_cast<std::size_t>(m) > kappa.size()) return 0.0;
  return detail::sigma_table(kappa, m)[m];
}

inline double sigma(int m, std::initializer_list<double> kappa) {
  return sigma(m, std::span<const double>(kappa.begin(), kappa.size()));
}

/// All of sigma_0 .. sigma_n in one O(n^2) sweep.
inline std::vector<double> sigma_all(std::span<const double> kappa) {
  return detail::sigma_table(kappa, static_cast<int>(kappa.size()));
}

/// sigma_m(kappa | i_1 ... i_j): sigma_m with the listed entries set to zero.
inline double sigma_deleted(int m, std::span<const double> kappa,
                            std::span<const std::size_t> excluded) {
  detail::check_order(m);
  for (std::size_t a = 0; a < excluded.size(); ++a) {
    if (excluded[a] >= kappa.size())
      throw std::domain_error("sigma_deleted: index " + std::to_string(excluded[a]) +
                              " out of range for n = " + std::to_string(kappa.size()));
    for (std::size_t b = a + 1; b < excluded.size(); ++b)
      if (excluded[a] == excluded[b])
        throw std::domain_error("sigma_deleted: repeated index " + std::to_string(excluded[a]));
  }
  if (static_cast<std::size_t>(m) > kappa.size()) return 0.0;
  return detail::sigma_table(kappa, m, excluded)[m];
}

inline double sigma_deleted(int m, std::span<const double> kappa,
                            std::initializer_list<std::size_t> excluded) {
  return sigma_deleted(m, kappa, std::span<const std::size_t>(excluded.begin(), excluded.size()));
}

/// d sigma_m / d kappa_i = sigma_{m-1}(kappa | i).
inline std::vector<double> sigma_gradient(int m, std::span<const double> kappa) {
  if (m < 1 || static_cast<std::size_t>(m) > kappa.size())
    throw std::domain_error("sigma_gradient: need 1 <= m <= n, got m = " + std::to_string(m));
  std::vector<double> g(kappa.size());
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const std::size_t ex[] = {i};
    g[i] = sigma_deleted(m - 1, kappa, ex);
  }
  return g;
}

/// Second derivative of sigma_k, viewed as a function of a matrix A, evaluated
/// at A = diag(kappa) and contracted twice with eta:
///
///   Q = sum_{p,q,r,s} d^2 sigma_k / (dA_pq dA_rs) eta_pq eta_rs
///     = sum_{p != q} sigma_{k-2}(kappa | p q) (eta_pp eta_qq - eta_pq eta_qp).
///
/// The diagonal block d^2/dA_pp dA_qq is sigma_{k-2}(kappa|pq) for p != q and 0
/// for p == q; the only other nonzero entries pair A_pq with A_qp (p != q) with
/// coefficient -sigma_{k-2}(kappa|pq). This is the second-order Taylor
/// coefficient of the sum of k x k principal minors of diag(kappa) + s eta.
inline double sigma_hessian_form(int k, std::span<const double> kappa, const SquareMatrix& eta) {
  const std::size_t n = kappa.size();
  if (eta.size() != n) throw std::domain_error("sigma_hessian_form: eta must be n x n");
  if (k < 2) return 0.0;
  double q = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t r = 0; r < n; ++r) {
      if (p == r) continue;
      const std::size_t ex[] = {p, r};
      const double s = sigma_deleted(k - 2, kappa, ex);
      q += s * (eta(p, p) * eta(r, r) - eta(p, r) * eta(r, p));
    }
  }
  return q;
}

/// Right-hand side of the Hessian-form bound on Gamma_k^+ (k >= 2):
///
///   -sigma_k (Ds/s - DH/H) ((2-k)/(k-1) Ds/s - k/(k-1) DH/H),
///
/// with Ds = sum_p sigma_{k-1}(kappa|p) eta_pp and DH = trace(eta), so that
/// sigma_hessian_form(k, kappa, eta) never exceeds it for symmetric eta.
inline double sigma_hessian_upper_bound(int k, std::span<const double> kappa,
                                        const SquareMatrix& eta) {
  if (k < 2) throw std::domain_error("sigma_hessian_upper_bound: requires k >= 2");
  const auto grad = sigma_gradient(k, kappa);
  double ds = 0.0, dh = 0.0;
  for (std::size_t p = 0; p < kappa.size(); ++p) {
    ds += grad[p] * eta(p, p);
    dh += eta(p, p);
  }
  const double sk = sigma(k, kappa);
  const double h = sigma(1, kappa);
  const double a = ds / sk - dh / h;
  const double km1 = static_cast<double>(k - 1);
  const double b = (2.0 - k) / km1 * ds / sk - k / km1 * dh / h;
  return -sk * a * b;
}

/// G = sigma_k^{1/k} as a function of the Weingarten matrix, first derivative
/// at a diagonal point. Only the diagonal of dG/dA is nonzero there.
inline std::vector<double> root_sigma_gradient(int k, std::span<const double> kappa) {
  const double sk = sigma(k, kappa);
  const double scale = std::pow(sk, 1.0 / k - 1.0) / k;
  auto g = sigma_gradient(k, kappa);
  for (double& v : g) v *= scale;
  return g;
}

/// Contraction of d^2 G / (dA dA) with eta twice, G = sigma_k^{1/k}, at diag(kappa).
inline double root_sigma_hessian_form(int k, std::span<const double> kappa,
                                      const SquareMatrix& eta) {
  const double sk = sigma(k, kappa);
  const double f1 = std::pow(sk, 1.0 / k - 1.0) / k;
  const double f2 = (1.0 / k) * (1.0 / k - 1.0) * std::pow(sk, 1.0 / k - 2.0);
  const auto grad = sigma_gradient(k, kappa);
  double ds = 0.0;
  for (std::size_t p = 0; p < kappa.size(); ++p) ds += grad[p] * eta(p, p);
  return f2 * ds * ds + f1 * sigma_hessian_form(k, kappa, eta);
}

/// Both sides of the inverse-concavity inequality for G = sigma_k^{1/k} at a
/// positive diagonal point:
///
///   lhs = (d^2G^{pq,lm} + 2 dG^{pm} hinv_q^l) eta_p^q eta_l^m
///   rhs = 2 G^{-1} (dG^{pq} eta_p^q)^2
///
/// where hinv is the inverse Weingarten map diag(1/kappa).
struct InverseConcavityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline InverseConcavityTerms inverse_concavity_terms(int k, std::span<const double> kappa,
                                                     const SquareMatrix& eta) {
  const std::size_t n = kappa.size();
  const auto dg = root_sigma_gradient(k, kappa);
  const double g = std::pow(sigma(k, kappa), 1.0 / k);
  double cross = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) cross += dg[p] / kappa[q] * eta(p, q) * eta(q, p);
  double lin = 0.0;
  for (std::size_t p = 0; p < n; ++p) lin += dg[p] * eta(p, p);
  return {root_sigma_hessian_form(k, kappa, eta) + 2.0 * cross, 2.0 / g * lin * lin};
}

struct ConeMembership {
  int max_k = 0;                      ///< largest m with sigma_j > tol_j for all 1 <= j <= m
  std::vector<double> per_j_values;   ///< sigma_1 .. sigma_n
};

/// Scale-aware default threshold for sigma_j: 1e-12 (1 + |kappa|_inf)^j.
inline double default_cone_tol(std::span<const double> kappa, int j) {
  double amax = 0.0;
  for (double v : kappa) amax = std::max(amax, std::abs(v));
  return 1e-12 * std::pow(1.0 + amax, j);
}

/// Garding cone test. A negative `tol` selects default_cone_tol per order.
inline ConeMembership cone_membership(std::span<const double> kappa, double tol = -1.0) {
  ConeMembership c;
  const auto all = sigma_all(kappa);
  c.per_j_values.assign(all.begin() + 1, all.end());
  for (std::size_t j = 1; j <= kappa.size(); ++j) {
    const double t = tol < 0.0 ? default_cone_tol(kappa, static_cast<int>(j)) : tol;
    if (!(all[j] > t)) break;
    c.max_k = static_cast<int>(j);
  }
  return c;
}

}  // namespace anisoflow
