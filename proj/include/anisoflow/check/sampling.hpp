/// \file
/// Seeded generators for the property suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anisoflow/symfun.hpp"

namespace anisoflow::check {

/// ANISOFLOW_SEED if set and parseable, else `fallback`.
inline std::uint64_t seed_from_env(std::uint64_t fallback = 20240611) {
  if (const char* s = std::getenv("ANISOFLOW_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

class CurvatureSampler {
 public:
  explicit CurvatureSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

  /// Non-increasing kappa in Gamma_m^+: positive draws, then sign flips on the
  /// smallest entries, rejected until sigma_1..sigma_m are all positive.
  std::vector<double> in_cone(int n, int m) {
    std::vector<double> k(n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      for (double& v : k) v = uniform(0.05, 3.0);
      std::sort(k.begin(), k.end(), std::greater<>());
      if (m < n) {
        for (int i = n - 1; i >= m && uniform(0.0, 1.0) < 0.6; --i) k[i] = -uniform(0.0, 1.0) * k[i];
        std::sort(k.begin(), k.end(), std::greater<>());
      }
      if (cone_membership(k, 0.0).max_k >= m) return k;
    }
    throw std::runtime_error("CurvatureSampler: rejection sampling did not terminate");
  }

  SquareMatrix symmetric(int n, double scale = 1.0) {
    SquareMatrix e(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) e(i, j) = e(j, i) = uniform(-scale, scale);
    return e;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace anisoflow::check
