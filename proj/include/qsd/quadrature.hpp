#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_n from the Chebyshev-like initial guesses.
inline GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendreRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
             static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / dp;
      if (std::abs(z - z1) <= 1e-15) {
        // recompute the derivative at the converged node
        p1 = 1.0;
        p2 = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
               static_cast<double>(j);
        }
        dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

/// Composite Gauss-Legendre configuration shared by the integral
/// cross-checks. `panels` is the starting panel count; refinement doubles it
/// until two successive estimates agree to `tolerance` (relative) or the node
/// count would exceed `max_nodes`.
struct QuadratureScheme {
  std::size_t nodes_per_panel = 16;
  std::size_t panels = 8;
  double tolerance = 1e-8;
  std::size_t max_nodes = 1024;

  [[nodiscard]] std::size_t total_nodes() const noexcept { return nodes_per_panel * panels; }

  void validate() const {
    if (nodes_per_panel == 0 || panels == 0) throw DomainError("QuadratureScheme: empty rule");
    if (total_nodes() < 64) throw DomainError("QuadratureScheme: fewer than 64 nodes");
    if (!(tolerance > 0.0)) throw DomainError("QuadratureScheme: tolerance must be positive");
  }
};

}  // namespace qsd
