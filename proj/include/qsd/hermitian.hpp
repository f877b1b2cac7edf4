#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/matrix.hpp"

namespace qsd {

/// Dense complex Hermitian matrix. Construction from an arbitrary square
/// matrix symmetrizes it, so entries(i,j) == conj(entries(j,i)) holds exactly.
class HermitianOperator {
 public:
  HermitianOperator() : m_(1, 1) {}

  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0) throw DomainError("HermitianOperator: need a non-empty square matrix");
    symmetrize();
  }

  /// Rejects instead of symmetrizing when the input deviates by more than `tol`.
  static HermitianOperator checked(Matrix m, double tol) {
    if (!m.square() || m.rows() == 0) throw DomainError("HermitianOperator: need a non-empty square matrix");
    if (m.hermitian_defect() > tol) throw DomainError("HermitianOperator: matrix is not Hermitian");
    return HermitianOperator(std::move(m));
  }

  static HermitianOperator zero(std::size_t dim) { return HermitianOperator(Matrix(dim, dim)); }
  static HermitianOperator identity(std::size_t dim) { return HermitianOperator(Matrix::identity(dim)); }
  static HermitianOperator diagonal(std::span<const double> d) { return HermitianOperator(Matrix::diagonal(d)); }
  static HermitianOperator diagonal(std::initializer_list<double> d) {
    return HermitianOperator(Matrix::diagonal(d));
  }
  /// |psi><psi|
  static HermitianOperator projector(std::span<const complex> psi) {
    Matrix m(psi.size(), psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
      for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return HermitianOperator(std::move(m));
  }

  [[nodiscard]] std::size_t dim() const noexcept { return m_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
  const complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  [[nodiscard]] double trace() const { return m_.trace().real(); }
  [[nodiscard]] double frobenius_norm() const { return m_.frobenius_norm(); }

  HermitianOperator& operator+=(const HermitianOperator& o) {
    m_ += o.m_;
    return *this;
  }
  HermitianOperator& operator-=(const HermitianOperator& o) {
    m_ -= o.m_;
    return *this;
  }
  HermitianOperator& operator*=(double s) {
    m_ *= complex(s);
    return *this;
  }
  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }
  friend HermitianOperator operator-(HermitianOperator a) { return a *= -1.0; }

  /// U A U*
  [[nodiscard]] HermitianOperator conjugated(const Matrix& u) const { return HermitianOperator(u * m_ * u.adjoint()); }

 private:
  void symmetrize() {
    const std::size_t n = m_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      m_(i, i) = m_(i, i).real();
      for (std::size_t j = i + 1; j < n; ++j) {
        const complex avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
        m_(i, j) = avg;
        m_(j, i) = std::conj(avg);
      }
    }
  }

  Matrix m_;
};

/// Eigenvalues ascending; column k of `eigenvectors` belongs to eigenvalues[k].
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  [[nodiscard]] std::size_t dim() const noexcept { return eigenvalues.size(); }
  [[nodiscard]] double min() const { return eigenvalues.front(); }
  [[nodiscard]] double max() const { return eigenvalues.back(); }

  /// V diag(f(lambda)) V*, for any scalar-valued f (real or complex result).
  template <class F>
  [[nodiscard]] Matrix apply(F&& f) const {
    const std::size_t n = dim();
    std::vector<complex> fv(n);
    for (std::size_t k = 0; k < n; ++k) fv[k] = complex(f(eigenvalues[k]));
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        complex s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += eigenvectors(i, k) * fv[k] * std::conj(eigenvectors(j, k));
        r(i, j) = s;
      }
    return r;
  }

  [[nodiscard]] Matrix reconstruct() const {
    return apply([](double x) { return x; });
  }
};

inline constexpr int kJacobiMaxSweeps = 30;

inline double machine_eps() { return std::numeric_limits<double>::epsilon(); }

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Annihilates a(p,q) with the unitary J = [[c, s], [-s e*, c e*]] acting on
// columns p,q (e = phase of a(p,q)), i.e. a phase fix followed by a real
// Jacobi rotation. a <- J* a J and v <- v J.
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const complex apq = a(p, q);
  const double mag = std::abs(apq);
  const complex e = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const complex ec = std::conj(e);

  for (std::size_t r = 0; r < n; ++r) {
    const complex arp = a(r, p);
    const complex arq = a(r, q);
    a(r, p) = c * arp - s * ec * arq;
    a(r, q) = s * arp + c * ec * arq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const complex apr = a(p, r);
    const complex aqr = a(q, r);
    a(p, r) = c * apr - s * e * aqr;
    a(q, r) = s * apr + c * e * aqr;
  }
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t r = 0; r < n; ++r) {
    const complex vrp = v(r, p);
    const complex vrq = v(r, q);
    v(r, p) = c * vrp - s * ec * vrq;
    v(r, q) = s * vrp + c * ec * vrq;
  }
}

}  // namespace detail

/// Cyclic complex Jacobi with threshold sweeps (capped at kJacobiMaxSweeps).
inline SpectralDecomposition eigendecompose(const HermitianOperator& op) {
  const std::size_t n = op.dim();
  Matrix a = op.matrix();
  Matrix v = Matrix::identity(n);

  // Entries this far below the rounding level of A are dropped outright.
  const double negligible = 1e-3 * machine_eps() * a.frobenius_norm() / static_cast<double>(n);
  bool converged = n == 1;
  for (int sweep = 1; sweep <= kJacobiMaxSweeps && !converged; ++sweep) {
    const double off = detail::off_diagonal_norm(a);
    if (off == 0.0) {
      converged = true;
      break;
    }
    // Early sweeps only rotate the large entries.
    const double thresh = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        const double g = 100.0 * mag;
        const double app = std::abs(a(p, p).real());
        const double aqq = std::abs(a(q, q).real());
        if (sweep > 4 && ((app + g == app && aqq + g == aqq) || mag <= negligible)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
        } else if (mag > thresh && mag > 0.0) {
          detail::jacobi_rotate(a, v, p, q);
        }
      }
    }
  }
  if (!converged && detail::off_diagonal_norm(a) != 0.0)
    throw ConvergenceError("eigendecompose: Jacobi iteration did not converge", detail::off_diagonal_norm(a));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  SpectralDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

/// f(A) through the eigenbasis. Throws DomainError if f is not finite at
/// some eigenvalue (e.g. log at 0).
template <class F>
HermitianOperator spectral_fn(const SpectralDecomposition& sd, F&& f) {
  for (double l : sd.eigenvalues) {
    const double y = f(l);
    if (!std::isfinite(y)) throw DomainError("spectral_fn: function undefined at eigenvalue " + std::to_string(l));
  }
  return HermitianOperator(sd.apply(f));
}

template <class F>
HermitianOperator spectral_fn(const HermitianOperator& a, F&& f) {
  return spectral_fn(eigendecompose(a), std::forward<F>(f));
}

/// dim * eps * lambda_max, the default cut between "support" and "kernel".
inline double default_support_threshold(const SpectralDecomposition& sd) {
  return static_cast<double>(sd.dim()) * machine_eps() * std::max(sd.max(), 0.0);
}

/// Orthonormal basis of the span of eigenvectors with eigenvalue > threshold.
struct SupportProjection {
  std::size_t rank = 0;
  Matrix basis;  // dim x rank
  double threshold = 0.0;

  [[nodiscard]] std::size_t dim() const noexcept { return basis.rows(); }
  [[nodiscard]] bool full() const noexcept { return rank == basis.rows(); }
};

inline SupportProjection support_of(const SpectralDecomposition& sd, std::optional<double> threshold = {}) {
  const double thr = threshold.value_or(default_support_threshold(sd));
  const std::size_t n = sd.dim();
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n; ++k)
    if (sd.eigenvalues[k] > thr) keep.push_back(k);
  SupportProjection p{keep.size(), Matrix(n, keep.size()), thr};
  for (std::size_t c = 0; c < keep.size(); ++c)
    for (std::size_t r = 0; r < n; ++r) p.basis(r, c) = sd.eigenvectors(r, keep[c]);
  return p;
}

inline SupportProjection support_of(const HermitianOperator& a, std::optional<double> threshold = {}) {
  return support_of(eigendecompose(a), threshold);
}

/// basis* A basis: the compression of A onto the range of P.
inline HermitianOperator restrict(const HermitianOperator& a, const SupportProjection& p) {
  if (a.dim() != p.dim()) throw DomainError("restrict: dimension mismatch");
  if (p.rank == 0) throw DomainError("restrict: projection has rank 0");
  return HermitianOperator(p.basis.adjoint() * a.matrix() * p.basis);
}

inline double trace_norm(const SpectralDecomposition& sd) {
  double s = 0.0;
  for (double l : sd.eigenvalues) s += std::abs(l);
  return s;
}
inline double trace_norm(const HermitianOperator& x) { return trace_norm(eigendecompose(x)); }

inline double operator_norm(const SpectralDecomposition& sd) {
  return std::max(std::abs(sd.min()), std::abs(sd.max()));
}
inline double operator_norm(const HermitianOperator& x) { return operator_norm(eigendecompose(x)); }

/// Tolerated negative eigenvalue for states and positive operators.
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

/// A positive-semidefinite operator, trace unconstrained.
class PositiveOperator {
 public:
  explicit PositiveOperator(HermitianOperator op) : op_(std::move(op)) {
    const auto sd = eigendecompose(op_);
    if (sd.min() < -kPsdTolerance * std::max(1.0, sd.max()))
      throw DomainError("PositiveOperator: negative eigenvalue " + std::to_string(sd.min()));
  }

  /// Skips the spectral check; for values positive by construction
  /// (nonnegative combinations of positive operators).
  static PositiveOperator assume_positive(HermitianOperator op) { return PositiveOperator(std::move(op), Trusted{}); }

  /// Clips eigenvalues above -kPsdTolerance to zero; rejects anything more negative.
  static PositiveOperator clipped(const HermitianOperator& op) {
    const auto sd = eigendecompose(op);
    if (sd.min() < -kPsdTolerance * std::max(1.0, sd.max()))
      throw DomainError("PositiveOperator: negative eigenvalue " + std::to_string(sd.min()));
    return assume_positive(HermitianOperator(sd.apply([](double x) { return std::max(x, 0.0); })));
  }

  [[nodiscard]] const HermitianOperator& op() const noexcept { return op_; }
  [[nodiscard]] std::size_t dim() const noexcept { return op_.dim(); }
  [[nodiscard]] double trace() const { return op_.trace(); }

  friend PositiveOperator operator+(const PositiveOperator& a, const PositiveOperator& b) {
    return assume_positive(a.op_ + b.op_);
  }
  friend PositiveOperator operator*(double s, const PositiveOperator& a) {
    if (s < 0.0) throw DomainError("PositiveOperator: negative scale factor");
    return assume_positive(s * a.op_);
  }

 protected:
  struct Trusted {};
  PositiveOperator(HermitianOperator op, Trusted) : op_(std::move(op)) {}

  HermitianOperator op_;
};

/// Positive operator with unit trace.
class DensityMatrix : public PositiveOperator {
 public:
  explicit DensityMatrix(HermitianOperator op) : PositiveOperator(std::move(op)) {
    if (std::abs(trace() - 1.0) > kTraceTolerance)
      throw DomainError("DensityMatrix: trace " + std::to_string(trace()) + " differs from 1");
  }

  /// Clips small negative eigenvalues and rescales to unit trace.
  static DensityMatrix normalized(const HermitianOperator& op) {
    auto pos = PositiveOperator::clipped(op);
    const double tr = pos.trace();
    if (!(tr > 0.0)) throw DomainError("DensityMatrix: cannot normalize an operator with zero trace");
    return DensityMatrix((1.0 / tr) * pos.op(), Trusted{});
  }

  static DensityMatrix assume_state(HermitianOperator op) { return DensityMatrix(std::move(op), Trusted{}); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return assume_state((1.0 / static_cast<double>(dim)) * HermitianOperator::identity(dim));
  }
  static DensityMatrix pure(std::span<const complex> psi) {
    double nrm = 0.0;
    for (const auto& z : psi) nrm += std::norm(z);
    if (!(nrm > 0.0)) throw DomainError("DensityMatrix::pure: zero vector");
    return assume_state((1.0 / nrm) * HermitianOperator::projector(psi));
  }

  /// w a + (1-w) b
  static DensityMatrix mix(double w, const DensityMatrix& a, const DensityMatrix& b) {
    if (w < 0.0 || w > 1.0) throw DomainError("DensityMatrix::mix: weight outside [0,1]");
    if (a.dim() != b.dim()) throw DomainError("DensityMatrix::mix: dimension mismatch");
    return assume_state(w * a.op() + (1.0 - w) * b.op());
  }

  [[nodiscard]] DensityMatrix conjugated(const Matrix& u) const { return assume_state(op_.conjugated(u)); }

 private:
  DensityMatrix(HermitianOperator op, Trusted t) : PositiveOperator(std::move(op), t) {}
};

}  // namespace qsd
