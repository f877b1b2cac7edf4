#pragma once

// Independent reference computations used by the verification suite and the
// tests. None of them goes through divided differences.

#include <cmath>

#include "qsd/divergence.hpp"
#include "qsd/frechet.hpp"
#include "qsd/hermitian.hpp"

namespace qsd::oracle {

inline HermitianOperator matrix_log(const HermitianOperator& a) {
  return spectral_fn(a, [](double x) { return std::log(x); });
}

/// (log(A + h D) - log(A - h D)) / 2h
inline Matrix central_difference_log(const HermitianOperator& a, const HermitianOperator& delta, double h) {
  const Matrix plus = matrix_log(a + h * delta).matrix();
  const Matrix minus = matrix_log(a - h * delta).matrix();
  return (1.0 / (2.0 * h)) * (plus - minus);
}

/// Step for difference quotients of log at A in direction D: a fixed
/// fraction of the distance from A to the boundary of the positive cone,
/// so that A +- 2hD stays well inside it.
inline double log_difference_step(const HermitianOperator& a, const HermitianOperator& delta, double fraction = 1e-3) {
  const double lmin = eigendecompose(a).min();
  const double dn = operator_norm(delta);
  if (!(lmin > 0.0)) throw DomainError("log_difference_step: A is not positive definite");
  if (dn == 0.0) return fraction * lmin;
  return fraction * lmin / dn;
}

/// Fourth-order central difference of t -> log(A + tD) at t = 0.
inline Matrix frechet_log_finite_difference(const HermitianOperator& a, const HermitianOperator& delta) {
  const double h = log_difference_step(a, delta);
  const Matrix d1 = central_difference_log(a, delta, h);
  const Matrix d2 = central_difference_log(a, delta, 2.0 * h);
  return (1.0 / 3.0) * (4.0 * d1 - d2);
}

/// -d^2/dt1 dt2 log(A + t1 D1 + t2 D2) at 0: four-point mixed difference with
/// one Richardson step.
inline Matrix second_frechet_log_finite_difference(const HermitianOperator& a, const HermitianOperator& d1,
                                                   const HermitianOperator& d2) {
  const double h = std::min(log_difference_step(a, d1, 1e-2), log_difference_step(a, d2, 1e-2));
  auto mixed = [&](double s) {
    auto at = [&](double s1, double s2) { return matrix_log(a + (s1 * s) * d1 + (s2 * s) * d2).matrix(); };
    return (-1.0 / (4.0 * s * s)) * (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1));
  };
  return (1.0 / 3.0) * (4.0 * mixed(h) - mixed(2.0 * h));
}

/// -alpha d/dalpha S(A || alpha A + (1-alpha) B) by a central difference in
/// alpha, on supp(A + B).
inline double skewed_entropy_log_derivative(const PositiveOperator& a, const PositiveOperator& b, double alpha,
                                            double step = 1e-5) {
  const auto js = detail::restrict_to_joint_support(a.op(), b.op());
  const double up = detail::skewed_relative_entropy(js, alpha + step);
  const double down = detail::skewed_relative_entropy(js, alpha - step);
  return -alpha * (up - down) / (2.0 * step);
}

/// The eigenvalues of a Hermitian matrix given as a generic Matrix.
inline std::vector<double> eigenvalues(const Matrix& m) { return eigendecompose(HermitianOperator(m)).eigenvalues; }

/// Relative Frobenius distance ||x - ref||_F / max(||ref||_F, floor).
inline double relative_distance(const Matrix& x, const Matrix& ref, double floor = 1e-300) {
  return (x - ref).frobenius_norm() / std::max(ref.frobenius_norm(), floor);
}

}  // namespace qsd::oracle
