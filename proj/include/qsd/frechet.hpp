#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qsd/divergence.hpp"
#include "qsd/hermitian.hpp"
#include "qsd/quadrature.hpp"

namespace qsd {

// ---------------------------------------------------------------------------
// Divided differences of log
// ---------------------------------------------------------------------------

/// Relative eigenvalue gap below which log[1] is replaced by the midpoint
/// derivative 2/(a+b).
inline constexpr double kConfluentGap = 1e-7;
/// Relative spread below which log[2] is evaluated by its Taylor series
/// around the mean instead of the difference quotient.
inline constexpr double kSecondOrderSpread = 1e-2;

/// log[1](a,b) = (log a - log b)/(a - b), a, b > 0.
inline double log_divided_difference(double a, double b) {
  const double hi = std::max(a, b);
  const double gap = std::abs(a - b);
  if (gap < kConfluentGap * hi) return 2.0 / (a + b);
  const double r = (a - b) / (a + b);
  if (std::abs(r) <= 0.5) return 2.0 * std::atanh(r) / (a - b);
  return (std::log(a) - std::log(b)) / (a - b);
}

/// log[2](x0,x1,x2), fully symmetric; -1/(2x^2) when all three coincide.
inline double log_second_divided_difference(double x0, double x1, double x2) {
  std::array<double, 3> x{x0, x1, x2};
  std::sort(x.begin(), x.end());
  const double spread = x[2] - x[0];
  if (spread >= kSecondOrderSpread * x[2])
    return (log_divided_difference(x[1], x[2]) - log_divided_difference(x[0], x[1])) / (x[2] - x[0]);

  // sum_k (-1)^(k+1) h_k(u) / ((k+2) m^2), h_k the complete homogeneous
  // symmetric polynomial in u_i = (x_i - m)/m.
  const double m = (x[0] + x[1] + x[2]) / 3.0;
  const std::array<double, 3> u{(x[0] - m) / m, (x[1] - m) / m, (x[2] - m) / m};
  constexpr int kTerms = 14;
  std::array<double, kTerms> h0{}, h01{}, h012{};
  double pw = 1.0;
  for (int k = 0; k < kTerms; ++k, pw *= u[0]) h0[k] = pw;
  for (int k = 0; k < kTerms; ++k) {
    h01[k] = h0[k] + (k > 0 ? u[1] * h01[k - 1] : 0.0);
    h012[k] = h01[k] + (k > 0 ? u[2] * h012[k - 1] : 0.0);
  }
  double s = 0.0;
  for (int k = kTerms - 1; k >= 0; --k) s += ((k % 2 == 0) ? -1.0 : 1.0) * h012[k] / static_cast<double>(k + 2);
  return s / (m * m);
}

/// log[1] and log[2] on a positive spectrum. The second-order tensor is
/// only stored when requested.
class DividedDifferenceTable {
 public:
  explicit DividedDifferenceTable(std::vector<double> eigenvalues, bool materialize_second = false)
      : eig_(std::move(eigenvalues)), n_(eig_.size()), first_(n_ * n_) {
    for (double l : eig_)
      if (!(l > 0.0)) throw DomainError("DividedDifferenceTable: eigenvalues must be positive");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        const double v = i == j ? 1.0 / eig_[i] : log_divided_difference(eig_[i], eig_[j]);
        first_[i * n_ + j] = v;
        first_[j * n_ + i] = v;
      }
    if (materialize_second) {
      second_.resize(n_ * n_ * n_);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          for (std::size_t k = 0; k < n_; ++k)
            second_[(i * n_ + j) * n_ + k] = log_second_divided_difference(eig_[i], eig_[j], eig_[k]);
    }
  }

  [[nodiscard]] std::size_t dim() const noexcept { return n_; }
  [[nodiscard]] const std::vector<double>& eigenvalues() const noexcept { return eig_; }
  [[nodiscard]] bool has_second() const noexcept { return !second_.empty(); }

  [[nodiscard]] double first(std::size_t i, std::size_t j) const { return first_[i * n_ + j]; }
  [[nodiscard]] double second(std::size_t i, std::size_t j, std::size_t k) const {
    if (has_second()) return second_[(i * n_ + j) * n_ + k];
    return log_second_divided_difference(eig_[i], eig_[j], eig_[k]);
  }

 private:
  std::vector<double> eig_;
  std::size_t n_;
  std::vector<double> first_;
  std::vector<double> second_;
};

// ---------------------------------------------------------------------------
// Frechet derivatives of log at a positive definite A
// ---------------------------------------------------------------------------

/// Eigendata of a positive definite A with the derivative maps
/// T_A(D) = d/dt log(A + tD) and R_A(D1,D2) = -d^2/dt1dt2 log(A + t1 D1 + t2 D2),
/// both evaluated in the eigenbasis of A (Daleckii-Krein).
class LogFrechet {
 public:
  explicit LogFrechet(const HermitianOperator& a) : LogFrechet(eigendecompose(a)) {}

  explicit LogFrechet(SpectralDecomposition sd) : sd_(std::move(sd)), dd_(checked_spectrum(sd_)) {}

  [[nodiscard]] std::size_t dim() const noexcept { return sd_.dim(); }
  [[nodiscard]] const SpectralDecomposition& spectrum() const noexcept { return sd_; }
  [[nodiscard]] const DividedDifferenceTable& table() const noexcept { return dd_; }

  [[nodiscard]] Matrix to_eigenbasis(const Matrix& x) const {
    return sd_.eigenvectors.adjoint() * x * sd_.eigenvectors;
  }
  [[nodiscard]] Matrix from_eigenbasis(const Matrix& x) const {
    return sd_.eigenvectors * x * sd_.eigenvectors.adjoint();
  }

  /// T_A extended linearly to arbitrary (non-Hermitian) matrices.
  [[nodiscard]] Matrix first(const Matrix& delta) const {
    check_dim(delta);
    Matrix t = to_eigenbasis(delta);
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) t(i, j) *= dd_.first(i, j);
    return from_eigenbasis(t);
  }
  [[nodiscard]] HermitianOperator first(const HermitianOperator& delta) const {
    return HermitianOperator(first(delta.matrix()));
  }

  [[nodiscard]] HermitianOperator second(const HermitianOperator& d1, const HermitianOperator& d2) const {
    check_dim(d1.matrix());
    check_dim(d2.matrix());
    const std::size_t n = dim();
    const Matrix a = to_eigenbasis(d1.matrix());
    const Matrix b = to_eigenbasis(d2.matrix());
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        complex s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += (a(i, k) * b(k, j) + b(i, k) * a(k, j)) * dd_.second(i, k, j);
        r(i, j) = -s;
      }
    return HermitianOperator(from_eigenbasis(r));
  }

  /// M_A(B,C) = tr B* T_A(C)
  [[nodiscard]] complex metric(const Matrix& b, const Matrix& c) const {
    check_dim(b);
    check_dim(c);
    const Matrix bt = to_eigenbasis(b);
    const Matrix ct = to_eigenbasis(c);
    complex s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) s += std::conj(bt(i, j)) * dd_.first(i, j) * ct(i, j);
    return s;
  }

  /// M_A(B,B) for Hermitian B; real and nonnegative.
  [[nodiscard]] double metric(const HermitianOperator& b) const {
    check_dim(b.matrix());
    const Matrix bt = to_eigenbasis(b.matrix());
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) s += std::norm(bt(i, j)) * dd_.first(i, j);
    return s;
  }

 private:
  static std::vector<double> checked_spectrum(const SpectralDecomposition& sd) {
    const double thr = default_support_threshold(sd);
    if (!(sd.min() > thr) || !(sd.min() > 0.0))
      throw DomainError("log derivative needs a positive definite operator (smallest eigenvalue " +
                        std::to_string(sd.min()) + ")");
    return sd.eigenvalues;
  }

  void check_dim(const Matrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw DomainError("log derivative: dimension mismatch");
  }

  SpectralDecomposition sd_;
  DividedDifferenceTable dd_;
};

/// T_A(Delta)
inline HermitianOperator frechet_log(const HermitianOperator& a, const HermitianOperator& delta) {
  return LogFrechet(a).first(delta);
}

/// R_A(D1, D2); R_A(D, D) is the quadratic form R_A(D).
inline HermitianOperator second_frechet_log(const HermitianOperator& a, const HermitianOperator& d1,
                                            const HermitianOperator& d2) {
  return LogFrechet(a).second(d1, d2);
}

/// M_A(B, C) = tr B* T_A(C)
inline complex metric_M(const HermitianOperator& a, const Matrix& b, const Matrix& c) {
  return LogFrechet(a).metric(b, c);
}
inline complex metric_M(const HermitianOperator& a, const HermitianOperator& b, const HermitianOperator& c) {
  return metric_M(a, b.matrix(), c.matrix());
}

// ---------------------------------------------------------------------------
// Integral representations (cross-check only)
// ---------------------------------------------------------------------------

struct QuadratureResult {
  Matrix value;
  std::size_t nodes = 0;
  bool converged = false;
  double last_change = 0.0;
};

namespace detail {

/// Crude spectral bounds of a positive definite A that do not touch the
/// eigensolver: lambda_max <= ||A||_F, lambda_min >= 1/||A^-1||_F.
inline std::pair<double, double> spectral_window(const Matrix& a) {
  const double hi = a.frobenius_norm();
  const double lo = 1.0 / inverse(a).frobenius_norm();
  return {lo, hi};
}

/// int_0^inf f(s) ds: one panel on [0, lo/4], `panels` geometric panels on
/// [lo/4, 4 hi], and the tail through s = 4 hi / v on v in (0, 1].
template <class F>
Matrix integrate_half_line_once(F&& f, double lo, double hi, std::size_t panels, const GaussLegendreRule& gl) {
  const double s_lo = 0.25 * lo;
  const double s_hi = 4.0 * hi;
  Matrix acc;
  bool first = true;
  auto add = [&](const Matrix& m, double w) {
    if (first) {
      acc = w * m;
      first = false;
    } else {
      acc += w * m;
    }
  };
  auto panel = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) add(f(mid + half * gl.nodes[k]), half * gl.weights[k]);
  };
  panel(0.0, s_lo);
  const double ratio = std::pow(s_hi / s_lo, 1.0 / static_cast<double>(panels));
  double a = s_lo;
  for (std::size_t p = 0; p < panels; ++p) {
    const double b = p + 1 == panels ? s_hi : a * ratio;
    panel(a, b);
    a = b;
  }
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const double v = 0.5 + 0.5 * gl.nodes[k];
    const double s = s_hi / v;
    add(f(s), 0.5 * gl.weights[k] * s_hi / (v * v));
  }
  return acc;
}

template <class F>
QuadratureResult integrate_half_line(F&& f, const Matrix& a, const QuadratureScheme& scheme) {
  scheme.validate();
  const auto gl = gauss_legendre(scheme.nodes_per_panel);
  const auto [lo, hi] = spectral_window(a);
  std::size_t panels = scheme.panels;
  auto nodes_for = [&](std::size_t p) { return (p + 2) * scheme.nodes_per_panel; };
  QuadratureResult res{integrate_half_line_once(f, lo, hi, panels, gl), nodes_for(panels), false, 0.0};
  while (nodes_for(2 * panels) <= scheme.max_nodes) {
    panels *= 2;
    Matrix next = integrate_half_line_once(f, lo, hi, panels, gl);
    res.last_change = (next - res.value).frobenius_norm();
    const double scale = std::max(next.frobenius_norm(), 1e-300);
    res.value = std::move(next);
    res.nodes = nodes_for(panels);
    if (res.last_change <= scheme.tolerance * scale) {
      res.converged = true;
      break;
    }
  }
  return res;
}

inline Matrix shifted_inverse(const Matrix& a, double s) {
  Matrix m = a;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += s;
  return inverse(m);
}

}  // namespace detail

/// Default for the operator integrals: the graded panels need room for
/// condition numbers up to ~1e6.
inline QuadratureScheme default_operator_quadrature() { return QuadratureScheme{16, 8, 1e-10, 4096}; }

/// int_0^inf (A+s)^-1 Delta (A+s)^-1 ds, resolvents by Gaussian elimination.
inline QuadratureResult frechet_log_quadrature(const HermitianOperator& a, const HermitianOperator& delta,
                                               const QuadratureScheme& scheme = default_operator_quadrature()) {
  if (a.dim() != delta.dim()) throw DomainError("frechet_log_quadrature: dimension mismatch");
  const Matrix& am = a.matrix();
  const Matrix& dm = delta.matrix();
  return detail::integrate_half_line(
      [&](double s) {
        const Matrix r = detail::shifted_inverse(am, s);
        return r * dm * r;
      },
      am, scheme);
}

/// int_0^inf R D1 R D2 R + R D2 R D1 R ds with R = (A+s)^-1.
inline QuadratureResult second_frechet_log_quadrature(const HermitianOperator& a, const HermitianOperator& d1,
                                                      const HermitianOperator& d2,
                                                      const QuadratureScheme& scheme = default_operator_quadrature()) {
  if (a.dim() != d1.dim() || a.dim() != d2.dim()) throw DomainError("second_frechet_log_quadrature: dimension mismatch");
  const Matrix& am = a.matrix();
  return detail::integrate_half_line(
      [&](double s) {
        const Matrix r = detail::shifted_inverse(am, s);
        const Matrix r1 = r * d1.matrix() * r;
        const Matrix r2 = r * d2.matrix() * r;
        return r1 * d2.matrix() * r + r2 * d1.matrix() * r;
      },
      am, scheme);
}

// ---------------------------------------------------------------------------
// Differential skew divergence and friends
// ---------------------------------------------------------------------------

namespace detail {

inline void check_unit_interval(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1], got " + std::to_string(alpha));
}

/// alpha(1-alpha) M_tau(A-B, A-B), tau = alpha A + (1-alpha) B, on the joint support.
inline double differential_skew_divergence(const JointSupport& js, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) return 0.0;
  const HermitianOperator tau = alpha * js.first + (1.0 - alpha) * js.second;
  return alpha * (1.0 - alpha) * LogFrechet(tau).metric(js.first - js.second);
}

/// (alpha/(1-alpha)) (tr A T_tau(A) - tr A) - alpha tr(A - B)
inline double differential_skew_divergence_alt(const JointSupport& js, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) return 0.0;
  const HermitianOperator tau = alpha * js.first + (1.0 - alpha) * js.second;
  const double k = alpha / (1.0 - alpha);
  const double ta = js.first.trace();
  return k * (LogFrechet(tau).metric(js.first) - ta) - alpha * (ta - js.second.trace());
}

}  // namespace detail

/// D_alpha(A||B) = alpha(1-alpha) M_{alpha A + (1-alpha) B}(A-B, A-B) on
/// supp(A+B); identically zero at alpha = 0 and alpha = 1.
inline double differential_skew_divergence(const PositiveOperator& a, const PositiveOperator& b, double alpha) {
  detail::check_unit_interval(alpha);
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  return detail::differential_skew_divergence(detail::restrict_to_joint_support(a.op(), b.op()), alpha);
}

/// alpha(1-alpha)(b-c)^2 / (alpha b + (1-alpha) c)
inline double scalar_differential_sd(double b, double c, double alpha) {
  detail::check_unit_interval(alpha);
  if (b < 0.0 || c < 0.0) throw DomainError("scalar_differential_sd: negative argument");
  if (b == 0.0 && c == 0.0) throw DomainError("scalar_differential_sd: both arguments zero");
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  const double d = b - c;
  return alpha * (1.0 - alpha) * d * d / (alpha * b + (1.0 - alpha) * c);
}

/// chi^2_log(A,B) = M_B(A-B, A-B), B positive definite.
inline double chi2_log(const PositiveOperator& a, const PositiveOperator& b) {
  if (a.dim() != b.dim()) throw DomainError("chi2_log: dimension mismatch");
  return LogFrechet(b.op()).metric(a.op() - b.op());
}

namespace detail {

/// Averages D_{exp(-x)} over x in [0, L], L = -log alpha. Panels are graded
/// geometrically towards x = 0 (where the integrand may carry x log x
/// terms when A is singular on the joint support) and each is split into
/// 2^r equal pieces until successive estimates agree.
inline double average_differential(const JointSupport& js, double neg_log_alpha, const QuadratureScheme& scheme) {
  scheme.validate();
  const auto gl = gauss_legendre(scheme.nodes_per_panel);
  constexpr int kGraded = 24;
  const std::size_t base = static_cast<std::size_t>(kGraded) + 1;
  auto estimate = [&](std::size_t split) {
    double total = 0.0;
    auto panel = [&](double lo, double hi) {
      const double width = (hi - lo) / static_cast<double>(split);
      for (std::size_t p = 0; p < split; ++p) {
        const double a = lo + width * static_cast<double>(p);
        const double half = 0.5 * width;
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
          const double x = a + half * (1.0 + gl.nodes[k]);
          total += half * gl.weights[k] * differential_skew_divergence(js, std::exp(-x));
        }
      }
    };
    double hi = neg_log_alpha;
    for (int j = 0; j < kGraded; ++j) {
      const double lo = 0.5 * hi;
      panel(lo, hi);
      hi = lo;
    }
    panel(0.0, hi);
    return total / neg_log_alpha;
  };
  std::size_t split = std::max<std::size_t>(1, scheme.panels / 8);
  double prev = estimate(split);
  while ((2 * split) * base * scheme.nodes_per_panel <= scheme.max_nodes) {
    split *= 2;
    const double cur = estimate(split);
    if (std::abs(cur - prev) <= scheme.tolerance * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace detail

/// Default for the averaging integral: 25 graded panels of 16 nodes, one
/// refinement allowed.
inline QuadratureScheme default_averaging_quadrature() { return QuadratureScheme{16, 8, 1e-9, 25 * 16 * 2}; }

/// SD_alpha(A||B) rebuilt as the average of D_alpha' over -log alpha' in
/// [0, -log alpha].
inline double sd_by_averaging(const PositiveOperator& a, const PositiveOperator& b, SkewParameter alpha,
                              const QuadratureScheme& scheme = default_averaging_quadrature()) {
  const auto js = detail::restrict_to_joint_support(a.op(), b.op());
  return detail::average_differential(js, alpha.neg_log(), scheme);
}

/// M_{B + eps C}(A, A) along a decreasing eps sequence, against the limit
/// M_{B|B}(A|B, A|B).
struct EpsilonLimitRecord {
  std::vector<double> eps;
  std::vector<double> values;
  double limit = 0.0;
  double final_gap = 0.0;
  bool monotone = true;
};

inline EpsilonLimitRecord metric_epsilon_limit_check(const PositiveOperator& a, const PositiveOperator& b,
                                                     const PositiveOperator& c, std::span<const double> eps_sequence) {
  if (a.dim() != b.dim() || a.dim() != c.dim()) throw DomainError("metric_epsilon_limit_check: dimension mismatch");
  if (eps_sequence.empty()) throw DomainError("metric_epsilon_limit_check: empty eps sequence");
  for (std::size_t k = 0; k < eps_sequence.size(); ++k) {
    if (!(eps_sequence[k] > 0.0)) throw DomainError("metric_epsilon_limit_check: eps must be positive");
    if (k > 0 && !(eps_sequence[k] < eps_sequence[k - 1]))
      throw DomainError("metric_epsilon_limit_check: eps sequence must be decreasing");
  }
  const auto sb = eigendecompose(b.op());
  const auto p = support_of(sb);
  if (p.rank == 0) throw DomainError("metric_epsilon_limit_check: B is zero");
  const HermitianOperator ar = restrict(a.op(), p);
  const double defect = a.trace() - ar.trace();
  if (defect > support_defect_tolerance(p, a.trace()))
    throw DomainError("metric_epsilon_limit_check: supp A is not contained in supp B");

  EpsilonLimitRecord rec;
  rec.limit = LogFrechet(restrict(b.op(), p)).metric(ar);
  for (double e : eps_sequence) {
    rec.eps.push_back(e);
    // B + eps C may stay singular (e.g. C = 0); evaluate on its support.
    const HermitianOperator be = b.op() + e * c.op();
    const auto pe = support_of(eigendecompose(be));
    rec.values.push_back(LogFrechet(restrict(be, pe)).metric(restrict(a.op(), pe)));
  }
  // eps decreasing => values non-decreasing towards the limit
  const double slack = 1e-9 * std::max(1.0, std::abs(rec.limit));
  for (std::size_t k = 1; k < rec.values.size(); ++k)
    if (rec.values[k] < rec.values[k - 1] - slack) rec.monotone = false;
  rec.final_gap = std::abs(rec.limit - rec.values.back());
  return rec;
}

}  // namespace qsd
