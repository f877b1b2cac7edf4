#pragma once

// Property-check registry: every invariant of the library is a named check
// that draws random instances, measures a slack (>= 0 when the property
// holds) and reports the worst case.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsd/divergence.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/frechet.hpp"
#include "qsd/hermitian.hpp"
#include "qsd/io.hpp"
#include "qsd/oracles.hpp"
#include "qsd/random.hpp"

namespace qsd::verify {

using nlohmann::json;

inline constexpr double kDefaultTolerance = 1e-8;

/// One named operator attached to a trial, embedded in the report when the
/// trial is the worst violating case.
struct Evidence {
  std::string name;
  HermitianOperator op;
};

struct TrialResult {
  double slack = 0.0;
  std::vector<Evidence> inputs;
  std::vector<std::pair<std::string, double>> parameters;
};

enum class Suite { core, frechet, ensemble, sim };

inline const char* suite_name(Suite s) {
  switch (s) {
    case Suite::core: return "core";
    case Suite::frechet: return "frechet";
    case Suite::ensemble: return "ensemble";
    case Suite::sim: return "sim";
  }
  return "?";
}

/// Statement of a library invariant; every entry must be covered by at least
/// one registered check.
struct Invariant {
  std::string key;
  std::string module;
  std::string statement;
};

inline const std::vector<Invariant>& invariant_catalog() {
  static const std::vector<Invariant> catalog = {
      {"eigendecomposition-residual", "hermitian-core", "||V diag(l) V* - A||_F <= 1e-12 max(1, ||A||_F), V unitary"},
      {"spectral-identity", "hermitian-core", "spectral_fn(A, id) = A within 1e-12"},
      {"trace-norm-axioms", "hermitian-core", "trace norm: triangle inequality and absolute homogeneity"},
      {"random-state-valid", "hermitian-core", "random_state output is PSD with unit trace"},
      {"channel-preserves-states", "hermitian-core", "random_cptp maps states to states"},
      {"sd-range", "divergence-measures", "0 <= SD_a <= 1"},
      {"sd-orthogonality", "divergence-measures", "SD_a = 1 iff tr(rho sigma) = 0"},
      {"sd-scaling", "divergence-measures", "SD_a(bX||bY) = b SD_a(X||Y), SD_a(bX||cX) = SD_a(b|c) tr X"},
      {"sd-unitary-invariance", "divergence-measures", "SD_a(U rho U*||U sigma U*) = SD_a(rho||sigma)"},
      {"sd-contractivity", "divergence-measures", "SD_a(Phi rho||Phi sigma) <= SD_a(rho||sigma)"},
      {"sd-joint-convexity", "divergence-measures", "SD_a of mixtures <= mixture of SD_a"},
      {"sd-trace-norm-sandwich", "divergence-measures",
       "2(1-a)^2/(-log a) T^2 <= SD_a <= T, tight on diag(t,0,1-t)/diag(0,t,1-t)"},
      {"skewed-entropy-bound", "divergence-measures", "S(rho||a rho + (1-a) sigma) <= -log a"},
      {"fidelity-trace-distance", "divergence-measures", "T <= sqrt(1 - F^2)"},
      {"frechet-order-preserving", "frechet-calculus", "X <= Y implies T_A(X) <= T_A(Y)"},
      {"frechet-sum-bound", "frechet-calculus", "T_{A+B}(A) <= 1"},
      {"second-frechet-sum-bound", "frechet-calculus", "R_{A+B}(A,A) <= 1"},
      {"metric-continuity", "frechet-calculus", "0 <= M_{A+B}(A,A) - M_{A+B+C}(A,A) <= a - a^2/(a+c)"},
      {"dsd-symmetry", "frechet-calculus", "D_a(A||B) = D_{1-a}(B||A)"},
      {"dsd-derivative", "frechet-calculus", "D_a(A||B) = -a d/da S(A||aA + (1-a)B)"},
      {"dsd-trace-norm-bounds", "frechet-calculus", "4a(1-a) T^2 <= D_a <= T"},
      {"dsd-contractivity", "frechet-calculus", "D_a(Phi rho||Phi sigma) <= D_a(rho||sigma)"},
      {"frechet-finite-difference", "frechet-calculus", "T_A(D) agrees with a difference quotient of log"},
      {"mixing-sd-identity", "ensemble-analysis", "entropy gain = weighted skew-divergence changes"},
      {"unitary-shift-bound", "ensemble-analysis",
       "SD_a(rho||U sigma U*) - SD_a(rho||sigma) <= 2||H||, D_a version <= min(1/a, 1/(1-a))||H||"},
      {"shifted-argument-bounds", "ensemble-analysis", "eight scalar bounds on SD/S differences of (A, A+B, A+B+C)"},
      {"trace-distance-continuity", "ensemble-analysis", "four continuity bounds in T(sigma1, sigma2), tight case"},
      {"holevo-bound-chain", "ensemble-analysis", "chi <= complement bound <= pairwise bound <= H(p) t"},
      {"continuity-rhs-shape", "ensemble-analysis", "SD_a(1|0) - SD_a(1|t) + SD_a(0|t) concave, increasing in t"},
  };
  return catalog;
}

struct Check {
  std::string id;
  std::string invariant;  // catalog key, empty for operation-level checks
  std::string label;      // the formula being tested
  Suite suite = Suite::core;
  std::optional<double> tolerance;  // empty: use the run tolerance
  std::size_t min_dim = 1;          // smaller requested dims are raised to this
  std::function<TrialResult(std::size_t dim, Rng& rng)> trial;
};

// ---------------------------------------------------------------------------
// Random instance generators
// ---------------------------------------------------------------------------

namespace gen {

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Hilbert-Schmidt state; one draw in four is rank deficient.
inline DensityMatrix state(std::size_t d, Rng& rng) {
  std::size_t rank = d;
  if (d > 1 && index(rng, 0, 3) == 0) rank = index(rng, 1, d - 1);
  return random_state(d, rng, rank);
}

inline PositiveOperator positive(std::size_t d, Rng& rng) {
  const double tr = uniform(rng, 0.1, 2.0);
  return tr * state(d, rng);
}

inline PositiveOperator full_rank_positive(std::size_t d, Rng& rng) { return uniform(rng, 0.1, 2.0) * random_state(d, rng); }

/// Random Hermitian perturbation with operator norm in (0.1, 2).
inline HermitianOperator perturbation(std::size_t d, Rng& rng) { return uniform(rng, 0.1, 2.0) * random_hamiltonian(d, rng); }

/// Positive definite U diag(l) U* with condition number up to 10^max_log10_cond
/// and overall scale in [0.1, 10]. With `degenerate`, some eigenvalues are
/// repeated exactly and others split by a relative 1e-9.
inline HermitianOperator positive_definite(std::size_t d, Rng& rng, double max_log10_cond, bool degenerate = false) {
  const double span = uniform(rng, 0.0, max_log10_cond);
  std::vector<double> l(d);
  for (auto& x : l) x = std::pow(10.0, -span * uniform(rng, 0.0, 1.0));
  l[0] = 1.0;
  if (d > 1) l[1] = std::pow(10.0, -span);
  if (degenerate && d > 1) {
    for (std::size_t k = 1; k < d; ++k) {
      const auto mode = index(rng, 0, 2);
      if (mode == 0) l[k] = l[k - 1];
      if (mode == 1) l[k] = l[k - 1] * (1.0 + 1e-9);
    }
  }
  const double scale = std::pow(10.0, uniform(rng, -1.0, 1.0));
  for (auto& x : l) x *= scale;
  const Matrix u = random_unitary(d, rng);
  return HermitianOperator(u * Matrix::diagonal(l) * u.adjoint());
}

/// Orthogonal pair: rho on the first k columns of a Haar basis, sigma on the rest.
inline std::pair<DensityMatrix, DensityMatrix> orthogonal_pair(std::size_t d, Rng& rng) {
  const std::size_t k = index(rng, 1, d - 1);
  const Matrix u = random_unitary(d, rng);
  std::vector<double> a(d, 0.0);
  std::vector<double> b(d, 0.0);
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i < k) sa += a[i] = uniform(rng, 0.05, 1.0);
    else sb += b[i] = uniform(rng, 0.05, 1.0);
  }
  for (auto& x : a) x /= sa;
  for (auto& x : b) x /= sb;
  return {DensityMatrix::assume_state(HermitianOperator(u * Matrix::diagonal(a) * u.adjoint())),
          DensityMatrix::assume_state(HermitianOperator(u * Matrix::diagonal(b) * u.adjoint()))};
}

inline Ensemble ensemble(std::size_t d, std::size_t n, Rng& rng) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < n; ++i) states.push_back(state(d, rng));
  return Ensemble(random_probabilities(n, rng), std::move(states));
}

inline KrausOperators channel(std::size_t d, Rng& rng) { return random_cptp(d, index(rng, 1, 3), rng); }

}  // namespace gen

// ---------------------------------------------------------------------------
// Slack helpers
// ---------------------------------------------------------------------------

/// lhs <= rhs
inline double le(double lhs, double rhs) { return rhs - lhs; }
/// a == b
inline double eq(double a, double b) { return -std::abs(a - b); }

inline double lambda_min(const HermitianOperator& a) { return eigendecompose(a).min(); }
inline double lambda_max(const HermitianOperator& a) { return eigendecompose(a).max(); }

namespace detail {

inline const std::vector<double>& skew_grid() {
  static const std::vector<double> g{0.01, 0.1, 0.5, 0.9, 0.99};
  return g;
}

/// The joint support of (A, B) viewed as positive operators.
inline std::pair<PositiveOperator, PositiveOperator> joint_restriction(const PositiveOperator& a,
                                                                       const PositiveOperator& b) {
  auto js = qsd::detail::restrict_to_joint_support(a.op(), b.op());
  return {PositiveOperator::assume_positive(std::move(js.first)), PositiveOperator::assume_positive(std::move(js.second))};
}

/// Right-hand sides of the four trace-distance continuity bounds.
inline double sd_rhs_first(double t, SkewParameter a) {
  return scalar_skew_divergence(1.0, 0.0, a) - scalar_skew_divergence(1.0, t, a) + scalar_skew_divergence(0.0, t, a);
}
inline double sd_rhs_second(double t, SkewParameter a) {
  return scalar_skew_divergence(0.0, 1.0, a) - scalar_skew_divergence(t, 1.0, a) + scalar_skew_divergence(t, 0.0, a);
}
inline double dsd_rhs_first(double t, double a) {
  return scalar_differential_sd(1.0, 0.0, a) - scalar_differential_sd(1.0, t, a) + scalar_differential_sd(0.0, t, a);
}
inline double dsd_rhs_second(double t, double a) {
  return scalar_differential_sd(0.0, 1.0, a) - scalar_differential_sd(t, 1.0, a) + scalar_differential_sd(t, 0.0, a);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The registry
// ---------------------------------------------------------------------------

namespace detail {

inline void add_core_checks(std::vector<Check>& r) {
  r.push_back({"eig.residual", "eigendecomposition-residual", "||V L V* - A||_F <= 1e-12 max(1,||A||_F); ||V*V - 1||_F <= 1e-12 n",
               Suite::core, 0.0, 1, [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::uniform(rng, 0.01, 100.0) * random_hamiltonian(d, rng);
                 const auto sd = eigendecompose(a);
                 const double res = (sd.reconstruct() - a.matrix()).frobenius_norm();
                 const double orth = (sd.eigenvectors.adjoint() * sd.eigenvectors - Matrix::identity(d)).frobenius_norm();
                 double slack = std::min(le(res, 1e-12 * std::max(1.0, a.frobenius_norm())),
                                         le(orth, 1e-12 * static_cast<double>(d)));
                 if (!std::is_sorted(sd.eigenvalues.begin(), sd.eigenvalues.end()))
                   slack = -std::numeric_limits<double>::infinity();
                 return TrialResult{slack, {{"A", a}}, {}};
               }});
  r.push_back({"spectral.identity", "spectral-identity", "||f(A) - A||_F <= 1e-12 max(1,||A||_F) for f = id",
               Suite::core, 0.0, 1, [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::uniform(rng, 0.01, 100.0) * random_hamiltonian(d, rng);
                 const HermitianOperator f = spectral_fn(a, [](double x) { return x; });
                 const double err = (f.matrix() - a.matrix()).frobenius_norm();
                 return TrialResult{le(err, 1e-12 * std::max(1.0, a.frobenius_norm())), {{"A", a}}, {}};
               }});
  r.push_back({"trace_norm.axioms", "trace-norm-axioms", "||X+Y||_1 <= ||X||_1 + ||Y||_1; ||cX||_1 = |c| ||X||_1",
               Suite::core, 1e-10, 1, [](std::size_t d, Rng& rng) {
                 const HermitianOperator x = gen::perturbation(d, rng);
                 const HermitianOperator y = gen::perturbation(d, rng);
                 const double c = gen::uniform(rng, -3.0, 3.0);
                 const double tri = le(trace_norm(x + y), trace_norm(x) + trace_norm(y));
                 const double hom = eq(trace_norm(c * x), std::abs(c) * trace_norm(x));
                 return TrialResult{std::min(tri, hom), {{"X", x}, {"Y", y}}, {{"c", c}}};
               }});
  r.push_back({"random_state.valid", "random-state-valid", "lambda_min >= -1e-10, |tr - 1| <= 1e-10 (50 draws per trial)",
               Suite::core, 1e-10, 1, [](std::size_t d, Rng& rng) {
                 TrialResult out{std::numeric_limits<double>::infinity(), {}, {}};
                 for (int k = 0; k < 50; ++k) {
                   const DensityMatrix s = random_state(d, rng);
                   const double slack = std::min(lambda_min(s.op()), eq(s.trace(), 1.0));
                   if (slack < out.slack) out = TrialResult{slack, {{"rho", s.op()}}, {}};
                 }
                 return out;
               }});
  r.push_back({"channel.states_to_states", "channel-preserves-states",
               "||sum K*K - 1||_F <= 1e-10; Phi(rho) PSD with unit trace", Suite::core, 1e-10, 1,
               [](std::size_t d, Rng& rng) {
                 const KrausOperators ks = gen::channel(d, rng);
                 const DensityMatrix rho = gen::state(d, rng);
                 const HermitianOperator out = apply_kraus(ks, rho.op());
                 const double slack =
                     std::min({-kraus_completeness_defect(ks), lambda_min(out), eq(out.trace(), 1.0)});
                 return TrialResult{slack, {{"rho", rho.op()}}, {{"dim_env", static_cast<double>(ks.size())}}};
               }});

  r.push_back({"sd.range", "sd-range", "0 <= SD_a(rho||sigma) <= 1, a in {0.01,0.1,0.5,0.9,0.99}", Suite::core, 1e-9, 1,
               [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 double slack = std::numeric_limits<double>::infinity();
                 for (double a : skew_grid()) {
                   const double v = skew_divergence(rho, sigma, SkewParameter(a));
                   slack = std::min({slack, v, 1.0 - v});
                 }
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {}};
               }});
  r.push_back({"sd.orthogonal_pairs", "sd-orthogonality", "rho _|_ sigma  =>  SD_a(rho||sigma) = 1", Suite::core, 1e-9, 2,
               [](std::size_t d, Rng& rng) {
                 const auto [rho, sigma] = gen::orthogonal_pair(d, rng);
                 double slack = std::numeric_limits<double>::infinity();
                 for (double a : skew_grid()) slack = std::min(slack, eq(skew_divergence(rho, sigma, SkewParameter(a)), 1.0));
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {}};
               }});
  r.push_back({"sd.overlapping_pairs", "sd-orthogonality", "tr(rho sigma) > 1e-9  =>  SD_a(rho||sigma) < 1 - 1e-9",
               Suite::core, 0.0, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 DensityMatrix sigma = gen::state(d, rng);
                 // guarantee overlap by mixing in a piece of rho
                 sigma = DensityMatrix::mix(gen::uniform(rng, 0.01, 0.5), rho, sigma);
                 double slack = std::numeric_limits<double>::infinity();
                 for (double a : skew_grid())
                   slack = std::min(slack, le(skew_divergence(rho, sigma, SkewParameter(a)), 1.0 - 1e-9));
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {}};
               }});
  r.push_back({"sd.scaling_common", "sd-scaling", "SD_a(bX||bY) = b SD_a(X||Y)", Suite::core, 1e-9, 1,
               [](std::size_t d, Rng& rng) {
                 const PositiveOperator x = gen::positive(d, rng);
                 const PositiveOperator y = gen::positive(d, rng);
                 const double b = gen::uniform(rng, 1e-3, 2.0);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const double slack = eq(skew_divergence(b * x, b * y, a), b * skew_divergence(x, y, a));
                 return TrialResult{slack, {{"X", x.op()}, {"Y", y.op()}}, {{"b", b}, {"alpha", a.value()}}};
               }});
  r.push_back({"sd.scaling_scalar", "sd-scaling", "SD_a(bX||cX) = SD_a(b|c) tr X", Suite::core, 1e-9, 1,
               [](std::size_t d, Rng& rng) {
                 const PositiveOperator x = gen::positive(d, rng);
                 const double b = gen::uniform(rng, 1e-3, 2.0);
                 const double c = gen::uniform(rng, 1e-3, 2.0);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const double slack = eq(skew_divergence(b * x, c * x, a), scalar_skew_divergence(b, c, a) * x.trace());
                 return TrialResult{slack, {{"X", x.op()}}, {{"b", b}, {"c", c}, {"alpha", a.value()}}};
               }});
  r.push_back({"sd.unitary_invariance", "sd-unitary-invariance", "SD_a(U rho U*||U sigma U*) = SD_a(rho||sigma)",
               Suite::core, 1e-9, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const Matrix u = random_unitary(d, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const double slack =
                     eq(skew_divergence(rho.conjugated(u), sigma.conjugated(u), a), skew_divergence(rho, sigma, a));
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", a.value()}}};
               }});
  r.push_back({"sd.contractivity", "sd-contractivity", "SD_a(Phi(rho)||Phi(sigma)) <= SD_a(rho||sigma)", Suite::core,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const KrausOperators ks = gen::channel(d, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const double slack = le(skew_divergence(apply_channel(ks, rho), apply_channel(ks, sigma), a),
                                         skew_divergence(rho, sigma, a));
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", a.value()}}};
               }});
  r.push_back({"sd.joint_convexity", "sd-joint-convexity",
               "SD_a(sum w_k rho_k||sum w_k sigma_k) <= sum w_k SD_a(rho_k||sigma_k), three terms", Suite::core,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const auto w = random_probabilities(3, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 HermitianOperator mr = HermitianOperator::zero(d);
                 HermitianOperator ms = HermitianOperator::zero(d);
                 double rhs = 0.0;
                 TrialResult out;
                 for (std::size_t k = 0; k < 3; ++k) {
                   const DensityMatrix rk = gen::state(d, rng);
                   const DensityMatrix sk = gen::state(d, rng);
                   mr += w[k] * rk.op();
                   ms += w[k] * sk.op();
                   rhs += w[k] * skew_divergence(rk, sk, a);
                   out.inputs.push_back({"rho" + std::to_string(k), rk.op()});
                   out.inputs.push_back({"sigma" + std::to_string(k), sk.op()});
                 }
                 out.slack = le(skew_divergence(DensityMatrix::assume_state(mr), DensityMatrix::assume_state(ms), a), rhs);
                 out.parameters = {{"alpha", a.value()}};
                 return out;
               }});
  r.push_back({"sd.trace_norm_lower", "sd-trace-norm-sandwich", "2(1-a)^2/(-log a) T(rho,sigma)^2 <= SD_a(rho||sigma)",
               Suite::core, std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const double t = trace_distance(rho, sigma);
                 const double lower = 2.0 * a.complement() * a.complement() / a.neg_log() * t * t;
                 return TrialResult{le(lower, skew_divergence(rho, sigma, a)), {{"rho", rho.op()}, {"sigma", sigma.op()}},
                                    {{"alpha", a.value()}}};
               }});
  r.push_back({"sd.trace_norm_upper", "sd-trace-norm-sandwich", "SD_a(rho||sigma) <= T(rho,sigma)", Suite::core,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 return TrialResult{le(skew_divergence(rho, sigma, a), trace_distance(rho, sigma)),
                                    {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", a.value()}}};
               }});
  r.push_back({"sd.trace_norm_tight", "sd-trace-norm-sandwich",
               "SD_a = t for rho = diag(t,0,1-t), sigma = diag(0,t,1-t); t in {0.1..0.9}, a in {0.1,0.5,0.9}",
               Suite::core, 1e-9, 3, [](std::size_t d, Rng& rng) {
                 const Matrix u = random_unitary(d, rng);
                 TrialResult out{std::numeric_limits<double>::infinity(), {}, {}};
                 for (int k = 1; k <= 9; ++k) {
                   const double t = 0.1 * k;
                   std::vector<double> r(d, 0.0);
                   std::vector<double> s(d, 0.0);
                   r[0] = t;
                   r[2] = 1.0 - t;
                   s[1] = t;
                   s[2] = 1.0 - t;
                   const auto rho = DensityMatrix::assume_state(HermitianOperator(u * Matrix::diagonal(r) * u.adjoint()));
                   const auto sigma = DensityMatrix::assume_state(HermitianOperator(u * Matrix::diagonal(s) * u.adjoint()));
                   for (double a : {0.1, 0.5, 0.9}) {
                     const double slack = eq(skew_divergence(rho, sigma, SkewParameter(a)), t);
                     if (slack < out.slack)
                       out = TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"t", t}, {"alpha", a}}};
                   }
                 }
                 return out;
               }});
  r.push_back({"sd.skewed_entropy_bound", "skewed-entropy-bound", "S(rho||a rho + (1-a) sigma) <= -log a", Suite::core,
               1e-9, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const SkewParameter a(gen::uniform(rng, 0.01, 0.99));
                 const auto js = qsd::detail::restrict_to_joint_support(rho.op(), sigma.op());
                 return TrialResult{le(qsd::detail::skewed_relative_entropy(js, a.value()), a.neg_log()),
                                    {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", a.value()}}};
               }});
  r.push_back({"fidelity.trace_distance", "fidelity-trace-distance", "T(rho,sigma) <= sqrt(1 - F(rho,sigma)^2)",
               Suite::core, std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const double f = fidelity(rho, sigma);
                 return TrialResult{le(trace_distance(rho, sigma), std::sqrt(std::max(0.0, 1.0 - f * f))),
                                    {{"rho", rho.op()}, {"sigma", sigma.op()}}, {}};
               }});
  r.push_back({"re.support_convention", "", "S(rho||sigma) finite and >= 0 iff supp rho in supp sigma", Suite::core,
               std::nullopt, 2, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = random_state(d, rng);
                 const DensityMatrix deficient = random_state(d, rng, gen::index(rng, 1, d - 1));
                 const DensityMatrix full = random_state(d, rng);
                 const auto inf = relative_entropy(rho, deficient);
                 const auto fin = relative_entropy(rho, full);
                 double slack = fin.is_infinite() ? -std::numeric_limits<double>::infinity() : fin.value;
                 if (!inf.is_infinite() || !(inf.support_defect > 0.0)) slack = -std::numeric_limits<double>::infinity();
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma_deficient", deficient.op()}, {"sigma", full.op()}}, {}};
               }});
}

inline void add_frechet_checks(std::vector<Check>& r) {
  r.push_back({"frechet.order_preserving", "frechet-order-preserving", "lambda_min(T_A(P)) >= 0 for P >= 0",
               Suite::frechet, 1e-9, 1, [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::positive_definite(d, rng, 3.0);
                 const PositiveOperator p = gen::positive(d, rng);
                 return TrialResult{lambda_min(frechet_log(a, p.op())), {{"A", a}, {"P", p.op()}}, {}};
               }});
  r.push_back({"frechet.sum_bound", "frechet-sum-bound", "lambda_max(T_{A+B}(A)) <= 1", Suite::frechet, 1e-9, 1,
               [](std::size_t d, Rng& rng) {
                 const PositiveOperator a = gen::positive(d, rng);
                 const PositiveOperator b = gen::positive(d, rng);
                 const auto [ar, br] = joint_restriction(a, b);
                 const double top = lambda_max(frechet_log(ar.op() + br.op(), ar.op()));
                 return TrialResult{le(top, 1.0), {{"A", a.op()}, {"B", b.op()}}, {}};
               }});
  r.push_back({"frechet.second_sum_bound", "second-frechet-sum-bound", "lambda_max(R_{A+B}(A,A)) <= 1", Suite::frechet,
               1e-9, 1, [](std::size_t d, Rng& rng) {
                 const PositiveOperator a = gen::positive(d, rng);
                 const PositiveOperator b = gen::positive(d, rng);
                 const auto [ar, br] = joint_restriction(a, b);
                 const double top = lambda_max(second_frechet_log(ar.op() + br.op(), ar.op(), ar.op()));
                 return TrialResult{le(top, 1.0), {{"A", a.op()}, {"B", b.op()}}, {}};
               }});
  auto metric_triple = [](std::size_t d, Rng& rng) {
    const PositiveOperator a = gen::positive(d, rng);
    const PositiveOperator b = gen::full_rank_positive(d, rng);
    const PositiveOperator c = gen::positive(d, rng);
    const double lhs = LogFrechet(a.op() + b.op()).metric(a.op()) - LogFrechet(a.op() + b.op() + c.op()).metric(a.op());
    return std::tuple{a, b, c, lhs};
  };
  r.push_back({"metric.continuity_lower", "metric-continuity", "0 <= M_{A+B}(A,A) - M_{A+B+C}(A,A)", Suite::frechet,
               std::nullopt, 1, [metric_triple](std::size_t d, Rng& rng) {
                 const auto [a, b, c, diff] = metric_triple(d, rng);
                 return TrialResult{le(0.0, diff), {{"A", a.op()}, {"B", b.op()}, {"C", c.op()}}, {}};
               }});
  r.push_back({"metric.continuity_upper", "metric-continuity", "M_{A+B}(A,A) - M_{A+B+C}(A,A) <= a - a^2/(a+c)",
               Suite::frechet, std::nullopt, 1, [metric_triple](std::size_t d, Rng& rng) {
                 const auto [a, b, c, diff] = metric_triple(d, rng);
                 const double ta = a.trace();
                 const double tc = c.trace();
                 return TrialResult{le(diff, ta - ta * ta / (ta + tc)), {{"A", a.op()}, {"B", b.op()}, {"C", c.op()}}, {}};
               }});
  r.push_back({"dsd.symmetry", "dsd-symmetry", "D_a(A||B) = D_{1-a}(B||A)", Suite::frechet, 1e-10, 1,
               [](std::size_t d, Rng& rng) {
                 const PositiveOperator a = gen::positive(d, rng);
                 const PositiveOperator b = gen::positive(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 return TrialResult{eq(differential_skew_divergence(a, b, al), differential_skew_divergence(b, a, 1.0 - al)),
                                    {{"A", a.op()}, {"B", b.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"dsd.derivative", "dsd-derivative", "D_a(A||B) = -a d/da S(A||aA+(1-a)B), central difference step 1e-5",
               Suite::frechet, 1e-6, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix a = gen::state(d, rng);
                 const DensityMatrix b = gen::state(d, rng);
                 const double al = gen::uniform(rng, 0.05, 0.95);
                 return TrialResult{eq(differential_skew_divergence(a, b, al), oracle::skewed_entropy_log_derivative(a, b, al)),
                                    {{"A", a.op()}, {"B", b.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"dsd.trace_norm_lower", "dsd-trace-norm-bounds", "4a(1-a) T(rho,sigma)^2 <= D_a(rho||sigma)",
               Suite::frechet, std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 const double t = trace_distance(rho, sigma);
                 return TrialResult{le(4.0 * al * (1.0 - al) * t * t, differential_skew_divergence(rho, sigma, al)),
                                    {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"dsd.trace_norm_upper", "dsd-trace-norm-bounds", "D_a(rho||sigma) <= T(rho,sigma)", Suite::frechet,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 return TrialResult{le(differential_skew_divergence(rho, sigma, al), trace_distance(rho, sigma)),
                                    {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"dsd.contractivity", "dsd-contractivity", "D_a(Phi(rho)||Phi(sigma)) <= D_a(rho||sigma)", Suite::frechet,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const KrausOperators ks = gen::channel(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 const double slack = le(differential_skew_divergence(apply_channel(ks, rho), apply_channel(ks, sigma), al),
                                         differential_skew_divergence(rho, sigma, al));
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"frechet.finite_difference", "frechet-finite-difference",
               "||T_A(D) - FD||_F <= 1e-6 ||T_A(D)||_F, cond(A) <= 1e6, degenerate spectra included", Suite::frechet, 0.0,
               1, [](std::size_t d, Rng& rng) {
                 const bool degenerate = gen::index(rng, 0, 2) == 0;
                 const HermitianOperator a = gen::positive_definite(d, rng, 6.0, degenerate);
                 const HermitianOperator delta = gen::perturbation(d, rng);
                 const Matrix t = frechet_log(a, delta).matrix();
                 const double rel = oracle::relative_distance(oracle::frechet_log_finite_difference(a, delta), t);
                 return TrialResult{le(rel, 1e-6), {{"A", a}, {"Delta", delta}}, {}};
               }});
  r.push_back({"frechet.quadrature", "", "||T_A(D) - integral representation||_F <= 1e-6 ||T_A(D)||_F, cond(A) <= 1e6",
               Suite::frechet, 0.0, 1, [](std::size_t d, Rng& rng) {
                 const bool degenerate = gen::index(rng, 0, 2) == 0;
                 const HermitianOperator a = gen::positive_definite(d, rng, 6.0, degenerate);
                 const HermitianOperator delta = gen::perturbation(d, rng);
                 const Matrix t = frechet_log(a, delta).matrix();
                 const auto q = frechet_log_quadrature(a, delta, default_operator_quadrature());
                 return TrialResult{le(oracle::relative_distance(q.value, t), 1e-6), {{"A", a}, {"Delta", delta}}, {}};
               }});
  r.push_back({"frechet.second_quadrature", "",
               "||R_A(D,D) - integral representation||_F <= 1e-6 ||R_A(D,D)||_F, cond(A) <= 1e4", Suite::frechet, 0.0, 1,
               [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::positive_definite(d, rng, 4.0, gen::index(rng, 0, 2) == 0);
                 const HermitianOperator delta = gen::perturbation(d, rng);
                 const Matrix rr = second_frechet_log(a, delta, delta).matrix();
                 const auto q = second_frechet_log_quadrature(a, delta, delta, default_operator_quadrature());
                 return TrialResult{le(oracle::relative_distance(q.value, rr), 1e-6), {{"A", a}, {"Delta", delta}}, {}};
               }});
  r.push_back({"frechet.second_finite_difference", "",
               "||R_A(D1,D2) - mixed difference||_F <= 1e-5 ||R_A(D1,D2)||_F, cond(A) <= 1e3", Suite::frechet, 0.0, 1,
               [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::positive_definite(d, rng, 3.0, gen::index(rng, 0, 2) == 0);
                 const HermitianOperator d1 = gen::perturbation(d, rng);
                 const HermitianOperator d2 = gen::perturbation(d, rng);
                 const Matrix rr = second_frechet_log(a, d1, d2).matrix();
                 const double rel = oracle::relative_distance(oracle::second_frechet_log_finite_difference(a, d1, d2), rr);
                 return TrialResult{le(rel, 1e-5), {{"A", a}, {"D1", d1}, {"D2", d2}}, {}};
               }});
  r.push_back({"frechet.second_at_base", "", "||R_A(A,D) - T_A(D)||_F <= 1e-8", Suite::frechet, 0.0, 1,
               [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::positive_definite(d, rng, 3.0, gen::index(rng, 0, 2) == 0);
                 const HermitianOperator delta = gen::perturbation(d, rng);
                 const LogFrechet lf(a);
                 const double err = (lf.second(a, delta).matrix() - lf.first(delta).matrix()).frobenius_norm();
                 return TrialResult{le(err, 1e-8), {{"A", a}, {"Delta", delta}}, {}};
               }});
  r.push_back({"metric.self_adjoint", "", "M_A(B,C) = conj(M_A(C,B)), M_A(B,B) >= 0", Suite::frechet, 1e-10, 1,
               [](std::size_t d, Rng& rng) {
                 const HermitianOperator a = gen::positive_definite(d, rng, 3.0);
                 const HermitianOperator b = gen::perturbation(d, rng);
                 const HermitianOperator c = gen::perturbation(d, rng);
                 const LogFrechet lf(a);
                 const complex bc = lf.metric(b.matrix(), c.matrix());
                 const complex cb = lf.metric(c.matrix(), b.matrix());
                 const double scale = std::max(1.0, std::abs(bc));
                 const double slack = std::min(-std::abs(bc - std::conj(cb)) / scale, lf.metric(b) / scale);
                 return TrialResult{slack, {{"A", a}, {"B", b}, {"C", c}}, {}};
               }});
  r.push_back({"dsd.alternate_form", "", "a(1-a) M_tau(A-B,A-B) = (a/(1-a))(tr A T_tau(A) - tr A) - a tr(A-B)",
               Suite::frechet, 1e-9, 1, [](std::size_t d, Rng& rng) {
                 const PositiveOperator a = gen::positive(d, rng);
                 const PositiveOperator b = gen::positive(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 const auto js = qsd::detail::restrict_to_joint_support(a.op(), b.op());
                 const double slack = eq(qsd::detail::differential_skew_divergence(js, al),
                                         qsd::detail::differential_skew_divergence_alt(js, al));
                 return TrialResult{slack, {{"A", a.op()}, {"B", b.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"chi2log.relation", "", "D_a(A||B) = (a/(1-a)) chi2_log(A, aA+(1-a)B)", Suite::frechet, 1e-9, 1,
               [](std::size_t d, Rng& rng) {
                 const PositiveOperator a = gen::full_rank_positive(d, rng);
                 const PositiveOperator b = gen::full_rank_positive(d, rng);
                 const double al = gen::uniform(rng, 0.01, 0.99);
                 const PositiveOperator tau = al * a + (1.0 - al) * b;
                 const double slack = eq(differential_skew_divergence(a, b, al), al / (1.0 - al) * chi2_log(a, tau));
                 return TrialResult{slack, {{"A", a.op()}, {"B", b.op()}}, {{"alpha", al}}};
               }});
  r.push_back({"chi2log.trace_norm", "", "chi2_log(rho,sigma) >= ||rho - sigma||_1^2", Suite::frechet, std::nullopt, 1,
               [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = random_state(d, rng);
                 const double n1 = trace_norm(rho.op() - sigma.op());
                 return TrialResult{le(n1 * n1, chi2_log(rho, sigma)), {{"rho", rho.op()}, {"sigma", sigma.op()}}, {}};
               }});
  r.push_back({"sd.averaging", "", "SD_a(A||B) = average of D_a' over -log a' in [0, -log a]", Suite::frechet, 1e-6, 1,
               [](std::size_t d, Rng& rng) {
                 const DensityMatrix a = gen::state(d, rng);
                 const DensityMatrix b = gen::state(d, rng);
                 const SkewParameter al(gen::uniform(rng, 0.01, 0.99));
                 const double slack = eq(sd_by_averaging(a, b, al), skew_divergence(a, b, al));
                 return TrialResult{slack, {{"A", a.op()}, {"B", b.op()}}, {{"alpha", al.value()}}};
               }});
  // B of random rank with spectrum in [0.05, 1], A supported inside supp B.
  struct LimitCase {
    PositiveOperator a, b;
    Matrix u;
    std::size_t rank;
  };
  auto limit_case = [](std::size_t d, Rng& rng) {
    const std::size_t rank = gen::index(rng, 1, d - 1);
    const Matrix u = random_unitary(d, rng);
    std::vector<double> bl(d, 0.0);
    for (std::size_t k = 0; k < rank; ++k) bl[k] = gen::uniform(rng, 0.05, 1.0);
    const Matrix inner = random_positive(rank, gen::uniform(rng, 0.1, 2.0), rng).op().matrix();
    Matrix am(d, d);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) am(i, j) = inner(i, j);
    return LimitCase{PositiveOperator::assume_positive(HermitianOperator(u * am * u.adjoint())),
                     PositiveOperator::assume_positive(HermitianOperator(u * Matrix::diagonal(bl) * u.adjoint())), u,
                     rank};
  };
  static const std::vector<double> kEps{1e-2, 1e-4, 1e-6, 1e-8};
  r.push_back({"metric.epsilon_limit", "",
               "C on the complement of supp B: M_{B+eC}(A,A) -> M_{B|B}(A|B,A|B) monotonically, gap <= 1e-6 at e = 1e-8",
               Suite::frechet, 0.0, 2, [limit_case](std::size_t d, Rng& rng) {
                 const LimitCase lc = limit_case(d, rng);
                 const Matrix inner = random_positive(d - lc.rank, gen::uniform(rng, 0.1, 2.0), rng).op().matrix();
                 Matrix cm(d, d);
                 for (std::size_t i = lc.rank; i < d; ++i)
                   for (std::size_t j = lc.rank; j < d; ++j) cm(i, j) = inner(i - lc.rank, j - lc.rank);
                 const auto c = PositiveOperator::assume_positive(HermitianOperator(lc.u * cm * lc.u.adjoint()));
                 const auto rec = metric_epsilon_limit_check(lc.a, lc.b, c, kEps);
                 double slack = le(rec.final_gap, 1e-6);
                 if (!rec.monotone) slack = std::min(slack, -1.0);
                 return TrialResult{slack, {{"A", lc.a.op()}, {"B", lc.b.op()}, {"C", c.op()}}, {}};
               }});
  r.push_back({"metric.epsilon_limit_general", "",
               "generic C >= 0: monotone approach, gap at e = 1e-8 <= e ||C|| (tr A / lambda_min(B|B))^2",
               Suite::frechet, 0.0, 2, [limit_case](std::size_t d, Rng& rng) {
                 const LimitCase lc = limit_case(d, rng);
                 const PositiveOperator c = gen::full_rank_positive(d, rng);
                 const auto rec = metric_epsilon_limit_check(lc.a, lc.b, c, kEps);
                 const auto sb = eigendecompose(lc.b.op());
                 const double bmin = sb.eigenvalues[d - lc.rank];
                 const double ratio = lc.a.trace() / bmin;
                 double slack = le(rec.final_gap, kEps.back() * operator_norm(c.op()) * ratio * ratio);
                 if (!rec.monotone) slack = std::min(slack, -1.0);
                 return TrialResult{slack, {{"A", lc.a.op()}, {"B", lc.b.op()}, {"C", c.op()}}, {}};
               }});
}

inline void add_ensemble_checks(std::vector<Check>& r) {
  // Shifted-argument bounds on random PSD triples, with a = tr A, c = tr C.
  struct Shifted {
    PositiveOperator a, b, c;
    SkewParameter alpha;
  };
  auto shifted = [](std::size_t d, Rng& rng) {
    return Shifted{gen::positive(d, rng), gen::positive(d, rng), gen::positive(d, rng),
                   SkewParameter(gen::uniform(rng, 0.01, 0.99))};
  };
  auto evidence = [](const Shifted& s) {
    return std::vector<Evidence>{{"A", s.a.op()}, {"B", s.b.op()}, {"C", s.c.op()}};
  };
  auto re = [](const PositiveOperator& x, const PositiveOperator& y) { return relative_entropy(x, y).value; };
  // SD_a(A||A+B) - SD_a(A||A+B+C)
  auto first_sd = [](const Shifted& s) {
    const PositiveOperator ab = s.a + s.b;
    return skew_divergence(s.a, ab, s.alpha) - skew_divergence(s.a, ab + s.c, s.alpha);
  };
  auto first_re = [re](const Shifted& s) {
    const PositiveOperator ab = s.a + s.b;
    return re(s.a, ab) - re(s.a, ab + s.c);
  };
  // SD_a(B||A+B) - SD_a(B+C||A+B+C)
  auto second_sd = [](const Shifted& s) {
    const PositiveOperator ab = s.a + s.b;
    return skew_divergence(s.b, ab, s.alpha) - skew_divergence(s.b + s.c, ab + s.c, s.alpha);
  };
  auto second_re = [re](const Shifted& s) {
    const PositiveOperator ab = s.a + s.b;
    return re(s.b, ab) - re(s.b + s.c, ab + s.c);
  };
  struct Bound {
    const char* id;
    const char* label;
    std::function<double(const Shifted&)> slack;
  };
  const std::vector<Bound> bounds = {
      {"shifted.sd_first_lower", "-SD_a(0|c) <= SD_a(A||A+B) - SD_a(A||A+B+C)",
       [=](const Shifted& s) { return le(-scalar_skew_divergence(0.0, s.c.trace(), s.alpha), first_sd(s)); }},
      {"shifted.sd_first_upper", "SD_a(A||A+B) - SD_a(A||A+B+C) <= -SD_a(a|a+c)",
       [=](const Shifted& s) {
         const double a = s.a.trace();
         return le(first_sd(s), -scalar_skew_divergence(a, a + s.c.trace(), s.alpha));
       }},
      {"shifted.re_first_lower", "-S(0|c) <= S(A||A+B) - S(A||A+B+C)",
       [=](const Shifted& s) { return le(-scalar_relative_entropy(0.0, s.c.trace()), first_re(s)); }},
      {"shifted.re_first_upper", "S(A||A+B) - S(A||A+B+C) <= -S(a|a+c)",
       [=](const Shifted& s) {
         const double a = s.a.trace();
         return le(first_re(s), -scalar_relative_entropy(a, a + s.c.trace()));
       }},
      {"shifted.sd_second_lower", "0 <= SD_a(B||A+B) - SD_a(B+C||A+B+C)",
       [=](const Shifted& s) { return le(0.0, second_sd(s)); }},
      {"shifted.sd_second_upper", "SD_a(B||A+B) - SD_a(B+C||A+B+C) <= SD_a(0|a) - SD_a(c|a+c)",
       [=](const Shifted& s) {
         const double a = s.a.trace();
         const double c = s.c.trace();
         return le(second_sd(s), scalar_skew_divergence(0.0, a, s.alpha) - scalar_skew_divergence(c, a + c, s.alpha));
       }},
      {"shifted.re_second_lower", "0 <= S(B||A+B) - S(B+C||A+B+C)",
       [=](const Shifted& s) { return le(0.0, second_re(s)); }},
      {"shifted.re_second_upper", "S(B||A+B) - S(B+C||A+B+C) <= S(0|a) - S(c|a+c)",
       [=](const Shifted& s) {
         const double a = s.a.trace();
         const double c = s.c.trace();
         return le(second_re(s), scalar_relative_entropy(0.0, a) - scalar_relative_entropy(c, a + c));
       }},
  };
  for (const auto& b : bounds) {
    r.push_back({b.id, "shifted-argument-bounds", b.label, Suite::ensemble, std::nullopt, 1,
                 [shifted, evidence, f = b.slack](std::size_t d, Rng& rng) {
                   const Shifted s = shifted(d, rng);
                   return TrialResult{f(s), evidence(s), {{"alpha", s.alpha.value()}}};
                 }});
  }

  // Trace-distance continuity in one argument, t = T(sigma1, sigma2).
  struct Triple {
    DensityMatrix rho, s1, s2;
    double t;
  };
  auto triple = [](std::size_t d, Rng& rng) {
    DensityMatrix rho = gen::state(d, rng);
    DensityMatrix s1 = gen::state(d, rng);
    DensityMatrix s2 = gen::index(rng, 0, 1) == 0 ? gen::state(d, rng)
                                                   : DensityMatrix::mix(gen::uniform(rng, 0.5, 1.0), s1, gen::state(d, rng));
    const double t = trace_distance(s1, s2);
    return Triple{std::move(rho), std::move(s1), std::move(s2), t};
  };
  auto triple_evidence = [](const Triple& x) {
    return std::vector<Evidence>{{"rho", x.rho.op()}, {"sigma1", x.s1.op()}, {"sigma2", x.s2.op()}};
  };
  struct Continuity {
    const char* id;
    const char* label;
    std::function<double(const Triple&, double)> slack;
  };
  const std::vector<Continuity> cont = {
      {"continuity.dsd_second_arg", "|D_a(rho||s1) - D_a(rho||s2)| <= D_a(1|0) - D_a(1|t) + D_a(0|t)",
       [](const Triple& x, double a) {
         const double lhs =
             std::abs(differential_skew_divergence(x.rho, x.s1, a) - differential_skew_divergence(x.rho, x.s2, a));
         return le(lhs, x.t > 0.0 ? dsd_rhs_first(x.t, a) : 0.0);
       }},
      {"continuity.dsd_first_arg", "|D_a(s1||rho) - D_a(s2||rho)| <= D_a(0|1) - D_a(t|1) + D_a(t|0)",
       [](const Triple& x, double a) {
         const double lhs =
             std::abs(differential_skew_divergence(x.s1, x.rho, a) - differential_skew_divergence(x.s2, x.rho, a));
         return le(lhs, x.t > 0.0 ? dsd_rhs_second(x.t, a) : 0.0);
       }},
      {"continuity.sd_second_arg", "|SD_a(rho||s1) - SD_a(rho||s2)| <= SD_a(1|0) - SD_a(1|t) + SD_a(0|t)",
       [](const Triple& x, double a) {
         const SkewParameter al(a);
         const double lhs = std::abs(skew_divergence(x.rho, x.s1, al) - skew_divergence(x.rho, x.s2, al));
         return le(lhs, x.t > 0.0 ? sd_rhs_first(x.t, al) : 0.0);
       }},
      {"continuity.sd_first_arg", "|SD_a(s1||rho) - SD_a(s2||rho)| <= SD_a(0|1) - SD_a(t|1) + SD_a(t|0)",
       [](const Triple& x, double a) {
         const SkewParameter al(a);
         const double lhs = std::abs(skew_divergence(x.s1, x.rho, al) - skew_divergence(x.s2, x.rho, al));
         return le(lhs, x.t > 0.0 ? sd_rhs_second(x.t, al) : 0.0);
       }},
  };
  for (const auto& c : cont) {
    r.push_back({c.id, "trace-distance-continuity", c.label, Suite::ensemble, std::nullopt, 1,
                 [triple, triple_evidence, f = c.slack](std::size_t d, Rng& rng) {
                   const Triple x = triple(d, rng);
                   const double a = gen::uniform(rng, 0.01, 0.99);
                   return TrialResult{f(x, a), triple_evidence(x), {{"alpha", a}, {"t", x.t}}};
                 }});
  }
  r.push_back({"continuity.sd_equality_case", "trace-distance-continuity",
               "rho _|_ s1, s2 = t rho + (1-t) s1: |SD_a(rho||s1) - SD_a(rho||s2)| = SD_a(1|0) - SD_a(1|t) + SD_a(0|t)",
               Suite::ensemble, 1e-9, 2, [](std::size_t d, Rng& rng) {
                 const auto [rho, s1] = gen::orthogonal_pair(d, rng);
                 const double t = gen::uniform(rng, 0.01, 0.99);
                 const DensityMatrix s2 = DensityMatrix::mix(t, rho, s1);
                 const SkewParameter al(gen::uniform(rng, 0.01, 0.99));
                 const double lhs = std::abs(skew_divergence(rho, s1, al) - skew_divergence(rho, s2, al));
                 return TrialResult{eq(lhs, sd_rhs_first(t, al)), {{"rho", rho.op()}, {"sigma1", s1.op()}},
                                    {{"alpha", al.value()}, {"t", t}}};
               }});
  r.push_back({"continuity.rhs_shape", "continuity-rhs-shape",
               "f(t) = SD_a(1|0) - SD_a(1|t) + SD_a(0|t) non-decreasing and midpoint concave on t = 0.01..0.99",
               Suite::ensemble, 1e-10, 1, [](std::size_t, Rng& rng) {
                 const SkewParameter al(gen::uniform(rng, 0.01, 0.99));
                 std::vector<double> f;
                 for (int k = 1; k <= 99; ++k) f.push_back(sd_rhs_first(0.01 * k, al));
                 double slack = std::numeric_limits<double>::infinity();
                 for (std::size_t k = 1; k < f.size(); ++k) slack = std::min(slack, f[k] - f[k - 1]);
                 for (std::size_t k = 1; k + 1 < f.size(); ++k) slack = std::min(slack, f[k] - 0.5 * (f[k - 1] + f[k + 1]));
                 return TrialResult{slack, {}, {{"alpha", al.value()}}};
               }});

  auto ens_evidence = [](const Ensemble& e) {
    std::vector<Evidence> ev;
    for (std::size_t i = 0; i < e.size(); ++i) ev.push_back({"rho" + std::to_string(i), e.state(i).op()});
    return ev;
  };
  auto ens_params = [](const Ensemble& e) {
    std::vector<std::pair<std::string, double>> p;
    for (std::size_t i = 0; i < e.size(); ++i) p.emplace_back("p" + std::to_string(i), e.weight(i));
    return p;
  };
  r.push_back({"holevo.three_forms", "",
               "S(rho_0) - sum p_i S(rho_i) = sum p_i S(rho_i||rho_0) = -sum p_i log p_i SD_{p_i}(rho_i||complement_i)",
               Suite::ensemble, 1e-9, 1, [=](std::size_t d, Rng& rng) {
                 const Ensemble e = gen::ensemble(d, gen::index(rng, 2, 4), rng);
                 const auto f = holevo_chi_forms(e);
                 return TrialResult{std::min(eq(f.entropy, f.relative_entropy), eq(f.entropy, f.skew)), ens_evidence(e),
                                    ens_params(e)};
               }});
  r.push_back({"holevo.bound_chain", "holevo-bound-chain",
               "chi <= -sum p_i log p_i T(rho_i, complement_i) <= pairwise bound <= H(p) max t_ij", Suite::ensemble,
               std::nullopt, 1, [=](std::size_t d, Rng& rng) {
                 const Ensemble e = gen::ensemble(d, gen::index(rng, 2, 4), rng);
                 const auto b = chi_upper_bounds(e);
                 const double slack = std::min({le(b.chi, b.complement_trace_bound),
                                                le(b.complement_trace_bound, b.pairwise_bound),
                                                le(b.pairwise_bound, b.entropy_times_t)});
                 return TrialResult{slack, ens_evidence(e), ens_params(e)};
               }});
  r.push_back({"holevo.fidelity_bound", "",
               "binary: chi <= S([[p, sqrt(p(1-p))F],[., 1-p]]) <= H(p) sqrt(1 - F^2)", Suite::ensemble, std::nullopt, 1,
               [=](std::size_t d, Rng& rng) {
                 const Ensemble e = gen::ensemble(d, 2, rng);
                 const auto b = chi_upper_bounds(e);
                 const double slack =
                     std::min(le(b.chi, *b.roga_bound), le(*b.roga_bound, *b.entropy_times_fidelity_distance));
                 return TrialResult{slack, ens_evidence(e), ens_params(e)};
               }});
  auto perturbed = [](const Ensemble& e, Rng& rng) {
    std::vector<DensityMatrix> states;
    const double s = gen::uniform(rng, 0.0, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i)
      states.push_back(DensityMatrix::mix(1.0 - s, e.state(i), gen::state(e.dim(), rng)));
    return Ensemble(e.weights(), std::move(states));
  };
  r.push_back({"holevo.continuity", "",
               "|chi(E) - chi(E')| <= weighted bound <= t log(1 + (n-1)/t) + log(1 + (n-1) t)", Suite::ensemble,
               std::nullopt, 1, [=](std::size_t d, Rng& rng) {
                 const Ensemble e = gen::ensemble(d, gen::index(rng, 2, 4), rng);
                 const Ensemble f = perturbed(e, rng);
                 const auto c = chi_continuity_bound(e, f);
                 auto ev = ens_evidence(e);
                 for (std::size_t i = 0; i < f.size(); ++i) ev.push_back({"rho_prime" + std::to_string(i), f.state(i).op()});
                 const double slack =
                     std::min(le(c.delta_chi, c.weighted_bound), le(c.weighted_bound, c.dimension_free_bound));
                 return TrialResult{slack, ev, ens_params(e)};
               }});
  r.push_back({"holevo.complement_distance", "",
               "T(complement_i, complement'_i) <= sum_{j!=i} p_j t_j / (1-p_i) <= max_{j!=i} t_j", Suite::ensemble, 1e-12,
               1, [=](std::size_t d, Rng& rng) {
                 const Ensemble e = gen::ensemble(d, gen::index(rng, 2, 4), rng);
                 const Ensemble f = perturbed(e, rng);
                 const auto c = chi_continuity_bound(e, f);
                 double slack = std::numeric_limits<double>::infinity();
                 for (std::size_t i = 0; i < e.size(); ++i)
                   slack = std::min({slack, le(c.complement_distance[i], c.complement_weighted_bound[i]),
                                     le(c.complement_weighted_bound[i], c.complement_max_bound[i])});
                 return TrialResult{slack, ens_evidence(e), ens_params(e)};
               }});
}

inline MixingExperiment random_experiment(std::size_t d, Rng& rng, bool full_rank = false) {
  std::vector<DensityMatrix> states;
  for (int j = 0; j < 2; ++j) states.push_back(full_rank ? random_state(d, rng) : gen::state(d, rng));
  Ensemble e(random_probabilities(2, rng), std::move(states));
  HermitianOperator h1 = gen::uniform(rng, 0.0, 1.0) * random_hamiltonian(d, rng);
  HermitianOperator h2 = gen::uniform(rng, 0.0, 1.0) * random_hamiltonian(d, rng);
  const double t = gen::uniform(rng, 1e-3, 1.0);
  return MixingExperiment(std::move(e), std::move(h1), std::move(h2), t);
}

inline std::vector<Evidence> experiment_evidence(const MixingExperiment& m) {
  return {{"rho1", m.ensemble.state(0).op()}, {"rho2", m.ensemble.state(1).op()}, {"H1", m.h1}, {"H2", m.h2}};
}

inline void add_sim_checks(std::vector<Check>& r) {
  r.push_back({"sim.entropy_gain", "", "S(rho_0(t)) - S(rho_0) <= 2 t h(p1,p2) ||H2 - H1||", Suite::sim, std::nullopt, 1,
               [](std::size_t d, Rng& rng) {
                 const MixingExperiment m = random_experiment(d, rng);
                 const auto rec = sim_bound_check(m);
                 return TrialResult{le(rec.entropy_gain, rec.sim_bound), experiment_evidence(m),
                                    {{"p1", m.ensemble.weight(0)}, {"t", m.time}}};
               }});
  r.push_back({"sim.sd_representation", "mixing-sd-identity",
               "S(rho_0(t)) - S(rho_0) = -sum_j p_j log p_j [SD_{p_j} after - SD_{p_j} before]", Suite::sim, std::nullopt,
               1, [](std::size_t d, Rng& rng) {
                 const MixingExperiment m = random_experiment(d, rng);
                 const auto rec = sim_bound_check(m);
                 return TrialResult{-rec.sd_representation_residual, experiment_evidence(m),
                                    {{"p1", m.ensemble.weight(0)}, {"t", m.time}}};
               }});
  r.push_back({"sim.sd_unitary_shift", "unitary-shift-bound",
               "SD_a(rho||U sigma U*) - SD_a(rho||sigma) <= 2||H||, U = exp(iH), a in {0.1,0.5,0.9}", Suite::sim,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const HermitianOperator h = gen::uniform(rng, 0.0, 1.0) * random_hamiltonian(d, rng);
                 const DensityMatrix shifted = sigma.conjugated(evolution_unitary(h, 1.0));
                 const double hn = operator_norm(h);
                 double slack = std::numeric_limits<double>::infinity();
                 for (double a : {0.1, 0.5, 0.9}) {
                   const SkewParameter al(a);
                   slack = std::min(slack, le(skew_divergence(rho, shifted, al) - skew_divergence(rho, sigma, al), 2.0 * hn));
                 }
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}, {"H", h}}, {}};
               }});
  r.push_back({"sim.dsd_unitary_shift", "unitary-shift-bound",
               "D_a(rho||U sigma U*) - D_a(rho||sigma) <= min(1/a, 1/(1-a)) ||H||, a in {0.1,0.5,0.9}", Suite::sim,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const DensityMatrix sigma = gen::state(d, rng);
                 const HermitianOperator h = gen::uniform(rng, 0.0, 1.0) * random_hamiltonian(d, rng);
                 const DensityMatrix shifted = sigma.conjugated(evolution_unitary(h, 1.0));
                 const double hn = operator_norm(h);
                 double slack = std::numeric_limits<double>::infinity();
                 for (double a : {0.1, 0.5, 0.9}) {
                   const double lhs = differential_skew_divergence(rho, shifted, a) - differential_skew_divergence(rho, sigma, a);
                   slack = std::min(slack, le(lhs, std::min(1.0 / a, 1.0 / (1.0 - a)) * hn));
                 }
                 return TrialResult{slack, {{"rho", rho.op()}, {"sigma", sigma.op()}, {"H", h}}, {}};
               }});
  r.push_back({"evolve.trace_distance", "", "T(U(t) rho U(t)*, rho) <= t ||H||; trace and spectrum preserved", Suite::sim,
               std::nullopt, 1, [](std::size_t d, Rng& rng) {
                 const DensityMatrix rho = gen::state(d, rng);
                 const HermitianOperator h = gen::perturbation(d, rng);
                 const double t = gen::uniform(rng, 0.0, 1.0);
                 const DensityMatrix rt = evolve(rho, h, t);
                 const auto e0 = eigendecompose(rho.op()).eigenvalues;
                 const auto e1 = eigendecompose(rt.op()).eigenvalues;
                 double eig_shift = 0.0;
                 for (std::size_t k = 0; k < d; ++k) eig_shift = std::max(eig_shift, std::abs(e0[k] - e1[k]));
                 const double slack = std::min({le(trace_distance(rt, rho), t * operator_norm(h)), eq(rt.trace(), 1.0),
                                                le(eig_shift, 1e-10)});
                 return TrialResult{slack, {{"rho", rho.op()}, {"H", h}}, {{"t", t}}};
               }});
  r.push_back({"mixing_rate.finite_difference", "", "|Lambda - (S(rho_0(h)) - S(rho_0(-h)))/2h| <= 1e-5, h = 1e-5",
               Suite::sim, 1e-5, 1, [](std::size_t d, Rng& rng) {
                 const MixingExperiment m = random_experiment(d, rng, true);
                 return TrialResult{eq(mixing_rate(m), mixing_rate_finite_difference(m)), experiment_evidence(m),
                                    {{"p1", m.ensemble.weight(0)}}};
               }});
}

}  // namespace detail

/// Every registered check, in report order.
inline const std::vector<Check>& registry() {
  static const std::vector<Check> checks = [] {
    std::vector<Check> r;
    detail::add_core_checks(r);
    detail::add_frechet_checks(r);
    detail::add_ensemble_checks(r);
    detail::add_sim_checks(r);
    return r;
  }();
  return checks;
}

/// Catalog keys without a covering check (empty when the registry is complete).
inline std::vector<std::string> uncovered_invariants(const std::vector<Check>& checks) {
  std::set<std::string> covered;
  for (const auto& c : checks) covered.insert(c.invariant);
  std::vector<std::string> missing;
  for (const auto& inv : invariant_catalog())
    if (!covered.count(inv.key)) missing.push_back(inv.key);
  return missing;
}

/// Throws std::logic_error when an invariant lacks a check or a check names
/// an unknown invariant or repeats an id.
inline void assert_registry_complete(const std::vector<Check>& checks) {
  const auto missing = uncovered_invariants(checks);
  if (!missing.empty()) throw std::logic_error("verification registry misses invariant " + missing.front());
  std::set<std::string> keys;
  for (const auto& inv : invariant_catalog()) keys.insert(inv.key);
  std::set<std::string> ids;
  for (const auto& c : checks) {
    if (!c.invariant.empty() && !keys.count(c.invariant))
      throw std::logic_error("check " + c.id + " names unknown invariant " + c.invariant);
    if (!ids.insert(c.id).second) throw std::logic_error("duplicate check id " + c.id);
  }
}

// ---------------------------------------------------------------------------
// Running checks and reporting
// ---------------------------------------------------------------------------

struct CheckRecord {
  std::string id;
  std::string invariant;
  std::string label;
  std::string suite;
  std::size_t trials = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  double tolerance = 0.0;
  std::optional<json> worst_case_inputs;
  std::optional<std::string> first_error;

  [[nodiscard]] bool passed() const noexcept { return violations == 0; }
};

/// FNV-1a, so that a check's random streams depend on its id only.
constexpr std::uint64_t id_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline json trial_to_json(const TrialResult& t, std::size_t dim, std::size_t trial) {
  json inputs = json::object();
  for (const auto& e : t.inputs) inputs[e.name] = io::to_json(e.op);
  json params = json::object();
  for (const auto& [k, v] : t.parameters) params[k] = v;
  return json{{"dim", dim}, {"trial", trial}, {"slack", t.slack}, {"states", inputs}, {"parameters", params}};
}

inline CheckRecord run_check(const Check& check, std::span<const std::size_t> dims, std::size_t trials,
                             std::uint64_t seed, double run_tolerance) {
  CheckRecord rec;
  rec.id = check.id;
  rec.invariant = check.invariant;
  rec.label = check.label;
  rec.suite = suite_name(check.suite);
  rec.tolerance = check.tolerance.value_or(run_tolerance);
  std::optional<TrialResult> worst_violation;
  std::size_t worst_dim = 0;
  std::size_t worst_trial = 0;
  for (std::size_t requested : dims) {
    const std::size_t d = std::max(requested, check.min_dim);
    for (std::size_t k = 0; k < trials; ++k) {
      Rng rng = make_stream(derive_seed(seed, id_hash(check.id), requested, k));
      TrialResult t;
      try {
        t = check.trial(d, rng);
      } catch (const std::exception& e) {
        t = TrialResult{-std::numeric_limits<double>::infinity(), {}, {}};
        if (!rec.first_error) rec.first_error = e.what();
      }
      ++rec.trials;
      if (std::isnan(t.slack)) t.slack = -std::numeric_limits<double>::infinity();
      const bool violated = t.slack < -rec.tolerance;
      if (violated) {
        ++rec.violations;
        if (!worst_violation || t.slack < worst_violation->slack) {
          worst_violation = t;
          worst_dim = d;
          worst_trial = k;
        }
      }
      rec.worst_slack = std::min(rec.worst_slack, t.slack);
    }
  }
  if (worst_violation) rec.worst_case_inputs = trial_to_json(*worst_violation, worst_dim, worst_trial);
  return rec;
}

inline std::optional<Suite> parse_suite(const std::string& name) {
  if (name == "core") return Suite::core;
  if (name == "frechet") return Suite::frechet;
  if (name == "ensemble") return Suite::ensemble;
  if (name == "sim") return Suite::sim;
  return std::nullopt;
}

inline bool is_suite_name(const std::string& name) { return name == "all" || parse_suite(name).has_value(); }

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<std::size_t> dims;
  std::size_t trials = 0;
  double tolerance = kDefaultTolerance;
  std::vector<CheckRecord> checks;
  double wall_time = 0.0;

  [[nodiscard]] std::size_t total_violations() const {
    std::size_t v = 0;
    for (const auto& c : checks) v += c.violations;
    return v;
  }
  [[nodiscard]] bool passed() const { return total_violations() == 0; }

  [[nodiscard]] json to_json() const {
    json cs = json::array();
    for (const auto& c : checks) {
      json j{{"check_id", c.id},
             {"label", c.label},
             {"invariant", c.invariant},
             {"suite", c.suite},
             {"trials", c.trials},
             {"worst_slack", std::isfinite(c.worst_slack) ? json(c.worst_slack) : json(nullptr)},
             {"violations", c.violations},
             {"tolerance", c.tolerance}};
      if (c.worst_case_inputs) j["worst_case_inputs"] = *c.worst_case_inputs;
      if (c.first_error) j["error"] = *c.first_error;
      cs.push_back(std::move(j));
    }
    json covered = json::array();
    for (const auto& inv : invariant_catalog()) {
      json ids = json::array();
      for (const auto& c : checks)
        if (c.invariant == inv.key) ids.push_back(c.id);
      if (!ids.empty()) covered.push_back(json{{"invariant", inv.key}, {"module", inv.module}, {"checks", ids}});
    }
    return json{{"suite", suite},
                {"seed", seed},
                {"dims", dims},
                {"trials", trials},
                {"tolerance", tolerance},
                {"checks", cs},
                {"coverage", covered},
                {"total_violations", total_violations()},
                {"wall_time", wall_time}};
  }
};

/// Runs every check of `suite` ("all" for every suite) over `dims`.
inline VerificationReport run_suite(const std::string& suite, std::span<const std::size_t> dims, std::size_t trials,
                                    std::uint64_t seed, double tolerance = kDefaultTolerance) {
  if (!is_suite_name(suite)) throw DomainError("unknown suite " + suite);
  if (trials == 0) throw DomainError("trials must be >= 1");
  if (dims.empty()) throw DomainError("no dimensions given");
  for (std::size_t d : dims)
    if (d == 0) throw DomainError("dimensions must be >= 1");
  const auto& checks = registry();
  assert_registry_complete(checks);
  const auto selected = parse_suite(suite);
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.suite = suite;
  rep.seed = seed;
  rep.dims.assign(dims.begin(), dims.end());
  rep.trials = trials;
  rep.tolerance = tolerance;
  for (const auto& c : checks)
    if (!selected || c.suite == *selected) rep.checks.push_back(run_check(c, dims, trials, seed, tolerance));
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace qsd::verify
