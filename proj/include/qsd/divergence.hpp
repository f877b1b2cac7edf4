#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "qsd/hermitian.hpp"
#include "qsd/random.hpp"

namespace qsd {

/// Skewing parameter alpha, restricted to [1e-12, 1 - 1e-12] so that
/// -log(alpha) and 1 - alpha stay well conditioned.
class SkewParameter {
 public:
  static constexpr double kMargin = 1e-12;

  explicit SkewParameter(double alpha) : alpha_(alpha) {
    if (!(alpha >= kMargin && alpha <= 1.0 - kMargin))
      throw DomainError("skew parameter must lie strictly inside (0,1), got " + std::to_string(alpha));
  }

  [[nodiscard]] double value() const noexcept { return alpha_; }
  [[nodiscard]] double complement() const noexcept { return 1.0 - alpha_; }
  /// -log(alpha) > 0
  [[nodiscard]] double neg_log() const noexcept { return -std::log(alpha_); }

 private:
  double alpha_;
};

/// A divergence that may be infinite. `support_defect` is the trace mass of the
/// first argument outside the support of the second (0 when finite).
struct DivergenceValue {
  double value = 0.0;
  double support_defect = 0.0;

  static DivergenceValue finite(double v) { return {v, 0.0}; }
  static DivergenceValue infinite(double defect) { return {std::numeric_limits<double>::infinity(), defect}; }

  [[nodiscard]] bool is_infinite() const noexcept { return std::isinf(value); }
};

namespace detail {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double entropy_of_spectrum(const std::vector<double>& eigs) {
  double s = 0.0;
  for (double l : eigs) s -= xlogx(l);
  return s;
}

/// tr A log A - tr A log B - tr(A - B) for B positive definite on the
/// working space (A positive semidefinite, 0 log 0 = 0).
inline double relative_entropy_definite(const HermitianOperator& a, const HermitianOperator& b) {
  const auto sa = eigendecompose(a);
  const auto sb = eigendecompose(b);
  double tr_alog_a = 0.0;
  for (double l : sa.eigenvalues) tr_alog_a += xlogx(l);
  // tr A log B = sum_k <v_k|A|v_k> log(lambda_k)
  const Matrix a_in_b = sb.eigenvectors.adjoint() * a.matrix() * sb.eigenvectors;
  double tr_alog_b = 0.0;
  for (std::size_t k = 0; k < sb.dim(); ++k) {
    const double w = a_in_b(k, k).real();
    if (w <= 0.0) continue;
    const double lam = std::max(sb.eigenvalues[k], std::numeric_limits<double>::min());
    tr_alog_b += w * std::log(lam);
  }
  return tr_alog_a - tr_alog_b - (a.trace() - b.trace());
}

}  // namespace detail

/// -tr rho log rho, with 0 log 0 = 0.
inline double von_neumann_entropy(const PositiveOperator& rho) {
  return detail::entropy_of_spectrum(eigendecompose(rho.op()).eigenvalues);
}

/// Mass of A outside supp(B) above which S(A||B) is declared infinite.
inline double support_defect_tolerance(const SupportProjection& p, double trace_a) {
  return std::max(p.threshold, 1e3 * static_cast<double>(p.dim()) * machine_eps() * std::max(1.0, trace_a));
}

/// S(A||B) = tr A(log A - log B) - tr(A - B), evaluated on supp(B). Infinite,
/// with the offending mass reported, when supp(A) is not inside supp(B).
inline DivergenceValue relative_entropy(const PositiveOperator& a, const PositiveOperator& b) {
  if (a.dim() != b.dim()) throw DomainError("relative_entropy: dimension mismatch");
  const auto sb = eigendecompose(b.op());
  const auto p = support_of(sb);
  const double tr_a = a.trace();
  if (p.rank == 0) {
    if (tr_a <= support_defect_tolerance(p, tr_a)) return DivergenceValue::finite(0.0);
    return DivergenceValue::infinite(tr_a);
  }
  const HermitianOperator ar = restrict(a.op(), p);
  const double defect = std::max(0.0, tr_a - ar.trace());
  if (defect > support_defect_tolerance(p, tr_a)) return DivergenceValue::infinite(defect);
  const HermitianOperator br = restrict(b.op(), p);
  return DivergenceValue::finite(detail::relative_entropy_definite(ar, br));
}

/// S(a|b) = a(log a - log b) - (a - b) for scalars, with the limits
/// S(0|b) = b and S(a|0) = inf for a > 0.
inline double scalar_relative_entropy(double a, double b) {
  if (a < 0.0 || b < 0.0) throw DomainError("scalar_relative_entropy: negative argument");
  if (a == 0.0) return b;
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return a * (std::log(a) - std::log(b)) - (a - b);
}

namespace detail {

/// rho, sigma compressed onto supp(rho + sigma).
struct JointSupport {
  HermitianOperator first;
  HermitianOperator second;
};

inline JointSupport restrict_to_joint_support(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
  const auto sd = eigendecompose(a + b);
  if (!(sd.max() > 0.0)) throw DomainError("the sum of both arguments is zero");
  const auto p = support_of(sd);
  if (p.full()) return {a, b};
  return {restrict(a, p), restrict(b, p)};
}

/// S(A || alpha A + (1-alpha) B) on supp(A+B), alpha in (0,1).
inline double skewed_relative_entropy(const JointSupport& js, double alpha) {
  const HermitianOperator tau = alpha * js.first + (1.0 - alpha) * js.second;
  return relative_entropy_definite(js.first, tau);
}

}  // namespace detail

/// SD_alpha(rho||sigma) = S(rho || alpha rho + (1-alpha) sigma) / (-log alpha),
/// both arguments compressed onto supp(rho + sigma). Always finite; in [0,1]
/// for states.
inline double skew_divergence(const PositiveOperator& rho, const PositiveOperator& sigma, SkewParameter alpha) {
  const auto js = detail::restrict_to_joint_support(rho.op(), sigma.op());
  return detail::skewed_relative_entropy(js, alpha.value()) / alpha.neg_log();
}

/// Scalar SD_alpha(b|c); SD_alpha(0|c) = (1-alpha) c / (-log alpha).
inline double scalar_skew_divergence(double b, double c, SkewParameter alpha) {
  if (b < 0.0 || c < 0.0) throw DomainError("scalar_skew_divergence: negative argument");
  if (b == 0.0 && c == 0.0) throw DomainError("scalar_skew_divergence: both arguments zero");
  const double a = alpha.value();
  const double mix = a * b + (1.0 - a) * c;
  const double head = b > 0.0 ? b * (std::log(b) - std::log(mix)) : 0.0;
  return (head - (1.0 - a) * (b - c)) / alpha.neg_log();
}

/// T(rho, sigma) = ||rho - sigma||_1 / 2.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DomainError("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(rho.op() - sigma.op());
}

namespace detail {

inline HermitianOperator psd_sqrt(const HermitianOperator& a) {
  const auto sd = eigendecompose(a);
  const double thr = default_support_threshold(sd);
  return HermitianOperator(sd.apply([thr](double x) { return x > thr ? std::sqrt(x) : 0.0; }));
}

}  // namespace detail

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0,1].
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DomainError("fidelity: dimension mismatch");
  const HermitianOperator r = detail::psd_sqrt(rho.op());
  const HermitianOperator inner(r.matrix() * sigma.op().matrix() * r.matrix());
  const auto sd = eigendecompose(inner);
  const double thr = default_support_threshold(sd);
  double f = 0.0;
  for (double l : sd.eigenvalues)
    if (l > thr) f += std::sqrt(l);
  return std::clamp(f, 0.0, 1.0);
}

inline constexpr double kKrausCompletenessTolerance = 1e-9;

/// || sum_i K_i* K_i - 1 ||_F
inline double kraus_completeness_defect(const KrausOperators& kraus) {
  if (kraus.empty()) throw DomainError("apply_channel: empty Kraus set");
  const std::size_t d = kraus.front().cols();
  Matrix s(d, d);
  for (const auto& k : kraus) {
    if (k.cols() != d) throw DomainError("apply_channel: Kraus operators have differing input dimension");
    s += k.adjoint() * k;
  }
  return (s - Matrix::identity(d)).frobenius_norm();
}

/// sum_i K_i A K_i*, no completeness check.
inline HermitianOperator apply_kraus(const KrausOperators& kraus, const HermitianOperator& a) {
  if (kraus.empty() || kraus.front().cols() != a.dim()) throw DomainError("apply_channel: dimension mismatch");
  const std::size_t out = kraus.front().rows();
  Matrix acc(out, out);
  for (const auto& k : kraus) acc += k * a.matrix() * k.adjoint();
  return HermitianOperator(std::move(acc));
}

inline PositiveOperator apply_channel(const KrausOperators& kraus, const PositiveOperator& a) {
  if (kraus_completeness_defect(kraus) > kKrausCompletenessTolerance)
    throw DomainError("apply_channel: Kraus operators are not trace preserving");
  return PositiveOperator::assume_positive(apply_kraus(kraus, a.op()));
}

inline DensityMatrix apply_channel(const KrausOperators& kraus, const DensityMatrix& rho) {
  if (kraus_completeness_defect(kraus) > kKrausCompletenessTolerance)
    throw DomainError("apply_channel: Kraus operators are not trace preserving");
  return DensityMatrix::assume_state(apply_kraus(kraus, rho.op()));
}

}  // namespace qsd
