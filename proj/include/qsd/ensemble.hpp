#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "qsd/divergence.hpp"
#include "qsd/frechet.hpp"
#include "qsd/hermitian.hpp"

namespace qsd {

/// Shannon entropy (natural log) of a probability vector.
inline double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) h -= detail::xlogx(x);
  return h;
}

/// h(p1, p2) = -p1 log p1 - p2 log p2
inline double binary_entropy(double p1, double p2) {
  const std::array<double, 2> p{p1, p2};
  return shannon_entropy(p);
}

/// Weighted collection of states {(p_i, rho_i)}. Zero-weight members are
/// dropped; the remaining weights are renormalized.
class Ensemble {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  Ensemble(std::vector<double> weights, std::vector<DensityMatrix> states) {
    if (weights.size() != states.size()) throw DomainError("Ensemble: weights and states differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0)) throw DomainError("Ensemble: negative weight");
      total += weights[i];
      if (weights[i] > 0.0) {
        weights_.push_back(weights[i]);
        states_.push_back(std::move(states[i]));
      }
    }
    if (states_.empty()) throw DomainError("Ensemble: no member with positive weight");
    if (std::abs(total - 1.0) > kWeightSumTolerance) throw DomainError("Ensemble: weights do not sum to 1");
    const double kept = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (auto& w : weights_) w /= kept;
    for (const auto& s : states_)
      if (s.dim() != states_.front().dim()) throw DomainError("Ensemble: states differ in dimension");
  }

  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return states_.front().dim(); }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<DensityMatrix>& states() const noexcept { return states_; }
  [[nodiscard]] double weight(std::size_t i) const { return weights_.at(i); }
  [[nodiscard]] const DensityMatrix& state(std::size_t i) const { return states_.at(i); }

 private:
  std::vector<double> weights_;
  std::vector<DensityMatrix> states_;
};

/// rho_0 = sum_i p_i rho_i
inline DensityMatrix average_state(const Ensemble& e) {
  HermitianOperator acc = HermitianOperator::zero(e.dim());
  for (std::size_t i = 0; i < e.size(); ++i) acc += e.weight(i) * e.state(i).op();
  return DensityMatrix::assume_state(std::move(acc));
}

/// (rho_0 - p_i rho_i)/(1 - p_i), formed as the reweighted mixture of the
/// other members.
inline DensityMatrix complementary_state(const Ensemble& e, std::size_t i) {
  if (e.size() < 2) throw DomainError("complementary_state: ensemble has a single member");
  if (i >= e.size()) throw DomainError("complementary_state: index out of range");
  HermitianOperator acc = HermitianOperator::zero(e.dim());
  double rest = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (j != i) {
      acc += e.weight(j) * e.state(j).op();
      rest += e.weight(j);
    }
  return DensityMatrix::assume_state((1.0 / rest) * acc);
}

/// chi(E) evaluated three independent ways.
struct HolevoForms {
  double entropy = 0.0;           // S(rho_0) - sum p_i S(rho_i)
  double relative_entropy = 0.0;  // sum p_i S(rho_i || rho_0)
  double skew = 0.0;              // -sum p_i log p_i SD_{p_i}(rho_i || complement_i)
};

/// S(sum p_i rho_i) - sum p_i S(rho_i)
inline double holevo_chi(const Ensemble& e) {
  double chi = von_neumann_entropy(average_state(e));
  for (std::size_t i = 0; i < e.size(); ++i) chi -= e.weight(i) * von_neumann_entropy(e.state(i));
  return chi;
}

inline HolevoForms holevo_chi_forms(const Ensemble& e) {
  HolevoForms f;
  f.entropy = holevo_chi(e);
  const DensityMatrix rho0 = average_state(e);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double p = e.weight(i);
    f.relative_entropy += p * relative_entropy(e.state(i), rho0).value;
    if (e.size() > 1) f.skew += -p * std::log(p) * skew_divergence(e.state(i), complementary_state(e, i), SkewParameter(p));
  }
  return f;
}

/// Upper bounds on chi(E), each >= chi.
struct ChiBounds {
  double chi = 0.0;
  /// -sum p_i log p_i T(rho_i, complement_i)
  double complement_trace_bound = 0.0;
  /// -sum p_i log p_i sum_{j!=i} p_j t_ij / (1 - p_i)
  double pairwise_bound = 0.0;
  /// H(p) max t_ij
  double entropy_times_t = 0.0;
  double max_pairwise_distance = 0.0;
  /// Binary ensembles: entropy of [[p, sqrt(p(1-p))F], [sqrt(p(1-p))F, 1-p]].
  std::optional<double> roga_bound;
  /// Binary ensembles: H(p) sqrt(1 - F^2).
  std::optional<double> entropy_times_fidelity_distance;
  std::optional<double> fidelity;
};

inline ChiBounds chi_upper_bounds(const Ensemble& e) {
  ChiBounds b;
  b.chi = holevo_chi(e);
  const std::size_t n = e.size();
  std::vector<double> t(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      t[i * n + j] = t[j * n + i] = trace_distance(e.state(i), e.state(j));
      b.max_pairwise_distance = std::max(b.max_pairwise_distance, t[i * n + j]);
    }
  const double hp = shannon_entropy(e.weights());
  b.entropy_times_t = hp * b.max_pairwise_distance;
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = e.weight(i);
      const double w = -p * std::log(p);
      b.complement_trace_bound += w * trace_distance(e.state(i), complementary_state(e, i));
      double inner = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) inner += e.weight(j) * t[i * n + j];
      b.pairwise_bound += w * inner / (1.0 - p);
    }
  }
  if (n == 2) {
    const double p = e.weight(0);
    const double f = fidelity(e.state(0), e.state(1));
    const double off = std::sqrt(p * (1.0 - p)) * f;
    const auto sd = eigendecompose(HermitianOperator(Matrix{{p, off}, {off, 1.0 - p}}));
    b.roga_bound = detail::entropy_of_spectrum(sd.eigenvalues);
    b.entropy_times_fidelity_distance = hp * std::sqrt(std::max(0.0, 1.0 - f * f));
    b.fidelity = f;
  }
  return b;
}

/// Continuity of chi between two ensembles with identical weights.
struct ChiContinuity {
  double delta_chi = 0.0;
  double max_distance = 0.0;  // t = max_i T(rho_i, rho'_i)
  /// sum p_i t log(1 + (1-p_i)/(p_i t)) + sum p_i log(1 + (1-p_i) t / p_i)
  double weighted_bound = 0.0;
  /// t log(1 + (n-1)/t) + log(1 + (n-1) t)
  double dimension_free_bound = 0.0;
  /// Per member: T(complement_i, complement'_i), sum_{j!=i} p_j t_j/(1-p_i), max_{j!=i} t_j.
  std::vector<double> complement_distance;
  std::vector<double> complement_weighted_bound;
  std::vector<double> complement_max_bound;
};

inline ChiContinuity chi_continuity_bound(const Ensemble& e, const Ensemble& f) {
  const std::size_t n = e.size();
  if (f.size() != n) throw DomainError("chi_continuity_bound: ensembles differ in size");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(e.weight(i) - f.weight(i)) > 1e-12) throw DomainError("chi_continuity_bound: weights differ");
  if (e.dim() != f.dim()) throw DomainError("chi_continuity_bound: dimension mismatch");

  ChiContinuity c;
  c.delta_chi = std::abs(holevo_chi(e) - holevo_chi(f));
  std::vector<double> ti(n);
  for (std::size_t i = 0; i < n; ++i) {
    ti[i] = trace_distance(e.state(i), f.state(i));
    c.max_distance = std::max(c.max_distance, ti[i]);
  }
  const double t = c.max_distance;
  const double nm1 = static_cast<double>(n - 1);
  if (t > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = e.weight(i);
      c.weighted_bound += p * t * std::log1p((1.0 - p) / (p * t)) + p * std::log1p((1.0 - p) * t / p);
    }
    c.dimension_free_bound = t * std::log1p(nm1 / t) + std::log1p(nm1 * t);
  }
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      c.complement_distance.push_back(trace_distance(complementary_state(e, i), complementary_state(f, i)));
      double num = 0.0;
      double mx = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          num += e.weight(j) * ti[j];
          mx = std::max(mx, ti[j]);
        }
      c.complement_weighted_bound.push_back(num / (1.0 - e.weight(i)));
      c.complement_max_bound.push_back(mx);
    }
  }
  return c;
}

/// exp(i t H)
inline Matrix evolution_unitary(const HermitianOperator& h, double t) {
  return eigendecompose(h).apply([t](double x) { return std::exp(complex(0.0, t * x)); });
}

/// U(t) rho U(t)*, U(t) = exp(i t H)
inline DensityMatrix evolve(const DensityMatrix& rho, const HermitianOperator& h, double t) {
  if (rho.dim() != h.dim()) throw DomainError("evolve: dimension mismatch");
  return rho.conjugated(evolution_unitary(h, t));
}

/// Binary ensemble whose members evolve under H_1 and H_2 for time t.
struct MixingExperiment {
  Ensemble ensemble;
  HermitianOperator h1;
  HermitianOperator h2;
  double time = 0.0;

  MixingExperiment(Ensemble e, HermitianOperator a, HermitianOperator b, double t)
      : ensemble(std::move(e)), h1(std::move(a)), h2(std::move(b)), time(t) {
    if (ensemble.size() > 2) throw DomainError("MixingExperiment: ensemble must have at most two members");
    if (h1.dim() != ensemble.dim() || h2.dim() != ensemble.dim())
      throw DomainError("MixingExperiment: Hamiltonian dimension differs from ensemble");
    if (!(time >= 0.0)) throw DomainError("MixingExperiment: time must be >= 0");
  }

  [[nodiscard]] const HermitianOperator& hamiltonian(std::size_t j) const { return j == 0 ? h1 : h2; }
};

namespace detail {

inline DensityMatrix evolved_average(const MixingExperiment& m, double t) {
  HermitianOperator acc = HermitianOperator::zero(m.ensemble.dim());
  for (std::size_t j = 0; j < m.ensemble.size(); ++j)
    acc += m.ensemble.weight(j) * evolve(m.ensemble.state(j), m.hamiltonian(j), t).op();
  return DensityMatrix::assume_state(std::move(acc));
}

}  // namespace detail

/// Lambda = d/dt S(rho_0(t)) at t = 0, as -tr(rho_0' log rho_0) on supp rho_0,
/// with rho_0' = sum_j p_j i[H_j, rho_j].
inline double mixing_rate(const MixingExperiment& m) {
  const std::size_t d = m.ensemble.dim();
  Matrix deriv(d, d);
  for (std::size_t j = 0; j < m.ensemble.size(); ++j) {
    const Matrix& h = m.hamiltonian(j).matrix();
    const Matrix& r = m.ensemble.state(j).op().matrix();
    deriv += complex(0.0, m.ensemble.weight(j)) * (h * r - r * h);
  }
  const auto sd = eigendecompose(average_state(m.ensemble).op());
  const auto p = support_of(sd);
  const Matrix dr = p.basis.adjoint() * deriv * p.basis;
  double rate = 0.0;
  for (std::size_t k = 0; k < p.rank; ++k) {
    const double lam = sd.eigenvalues[sd.dim() - p.rank + k];
    rate -= dr(k, k).real() * std::log(lam);
  }
  return rate;
}

/// (S(rho_0(h)) - S(rho_0(-h))) / 2h
inline double mixing_rate_finite_difference(const MixingExperiment& m, double h = 1e-5) {
  return (von_neumann_entropy(detail::evolved_average(m, h)) - von_neumann_entropy(detail::evolved_average(m, -h))) /
         (2.0 * h);
}

/// One side of SD_alpha(rho||U sigma U*) - SD_alpha(rho||sigma) <= 2||H||.
struct SkewShiftRecord {
  double alpha = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Finite-time entropy gain of a binary mixing experiment against 2 t h(p) ||H||.
/// The experiment is taken in the frame H_1 = 0, H_2 = H := H_2 - H_1.
struct SimRecord {
  double entropy_gain = 0.0;
  double sim_bound = 0.0;
  /// -sum_j p_j log p_j (skew divergence change of member j)
  double sd_representation = 0.0;
  double sd_representation_residual = 0.0;
  std::array<SkewShiftRecord, 2> unitary_shift{};
};

inline SimRecord sim_bound_check(const MixingExperiment& m) {
  if (m.ensemble.size() != 2) throw DomainError("sim_bound_check: needs a binary ensemble");
  const double p1 = m.ensemble.weight(0);
  const double p2 = m.ensemble.weight(1);
  const DensityMatrix& rho1 = m.ensemble.state(0);
  const DensityMatrix& rho2 = m.ensemble.state(1);
  const HermitianOperator h = m.h2 - m.h1;
  const double t = m.time;
  const Matrix u = evolution_unitary(h, t);

  const DensityMatrix rho2t = rho2.conjugated(u);
  const DensityMatrix rho1back = rho1.conjugated(u.adjoint());
  const DensityMatrix avg0 = DensityMatrix::mix(p1, rho1, rho2);
  const DensityMatrix avgt = DensityMatrix::mix(p1, rho1, rho2t);

  SimRecord r;
  r.entropy_gain = von_neumann_entropy(avgt) - von_neumann_entropy(avg0);
  const double hnorm = operator_norm(h);
  r.sim_bound = 2.0 * t * binary_entropy(p1, p2) * hnorm;

  const SkewParameter a1(p1);
  const SkewParameter a2(p2);
  const double d1 = skew_divergence(rho1, rho2t, a1) - skew_divergence(rho1, rho2, a1);
  const double d2 = skew_divergence(rho2, rho1back, a2) - skew_divergence(rho2, rho1, a2);
  r.sd_representation = -p1 * std::log(p1) * d1 - p2 * std::log(p2) * d2;
  r.sd_representation_residual = std::abs(r.entropy_gain - r.sd_representation);
  r.unitary_shift[0] = {p1, d1, 2.0 * t * hnorm};
  r.unitary_shift[1] = {p2, d2, 2.0 * t * hnorm};
  return r;
}

}  // namespace qsd
