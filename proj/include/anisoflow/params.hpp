#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "anisoflow/symfun.hpp"

namespace anisoflow {

/// Position of alpha relative to the threshold beta + k.
enum class Regime { sub, critical, super };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::sub: return "sub";
    case Regime::critical: return "critical";
    case Regime::super: return "super";
  }
  return "?";
}

/// Flow with normal speed r^(alpha/beta) sigma_k^(1/beta) on n-dimensional
/// hypersurfaces in R^{n+1}.
struct FlowParams {
  int n = 2;
  int k = 1;
  double alpha = 3.0;
  double beta = 1.0;

  static FlowParams make(int n, int k, double alpha, double beta) {
    FlowParams p{n, k, alpha, beta};
    p.validate();
    return p;
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("FlowParams: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("FlowParams: k must lie in [1, n]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("FlowParams: beta must be > 0");
    if (!std::isfinite(alpha)) throw std::invalid_argument("FlowParams: alpha must be finite");
  }

  /// gamma = (C_n^k)^(1/beta); the sphere speed at r = 1.
  double gamma() const { return std::pow(binomial(n, k), 1.0 / beta); }

  /// (alpha - beta - k) / beta. Zero exactly in the critical regime.
  double excess() const { return is_critical() ? 0.0 : (alpha - beta - k) / beta; }

  bool is_critical() const {
    return std::abs(alpha - beta - k) <= 1e-12 * (1.0 + std::abs(alpha) + beta + k);
  }

  Regime regime() const {
    if (is_critical()) return Regime::critical;
    return alpha < beta + k ? Regime::sub : Regime::super;
  }
};

}  // namespace anisoflow
