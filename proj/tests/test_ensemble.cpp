#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qsd/divergence.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/random.hpp"

using namespace qsd;

namespace {

DensityMatrix diag_state(std::initializer_list<double> d) { return DensityMatrix(HermitianOperator::diagonal(d)); }

double frob(const PositiveOperator& a, const PositiveOperator& b) {
  return (a.op().matrix() - b.op().matrix()).frobenius_norm();
}

}  // namespace

TEST(Entropies, ShannonAndBinary) {
  const std::vector<double> p{0.25, 0.25, 0.5};
  EXPECT_NEAR(shannon_entropy(p), 1.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(binary_entropy(0.5, 0.5), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0, 0.0), 0.0);
}

TEST(EnsembleType, ValidatesAndDropsZeroWeights) {
  Rng rng = make_stream(1);
  const auto a = random_state(2, rng);
  const auto b = random_state(2, rng);
  EXPECT_THROW(Ensemble({0.5, 0.6}, {a, b}), DomainError);
  EXPECT_THROW(Ensemble({0.5}, {a, b}), DomainError);
  EXPECT_THROW(Ensemble({1.2, -0.2}, {a, b}), DomainError);
  EXPECT_THROW(Ensemble({0.5, 0.5}, {a, random_state(3, rng)}), DomainError);
  const Ensemble e({1.0, 0.0}, {a, b});
  EXPECT_EQ(e.size(), 1u);
}

TEST(AverageState, Examples) {
  Rng rng = make_stream(2);
  const auto rho = random_state(3, rng);
  EXPECT_LE(frob(average_state(Ensemble({1.0}, {rho})), rho), 1e-15);
  EXPECT_LE(frob(average_state(Ensemble({0.5, 0.5}, {rho, rho})), rho), 1e-15);
  const auto e = Ensemble({0.5, 0.5}, {diag_state({1.0, 0.0}), diag_state({0.0, 1.0})});
  EXPECT_LE(frob(average_state(e), diag_state({0.5, 0.5})), 1e-15);
}

TEST(ComplementaryState, Examples) {
  Rng rng = make_stream(3);
  const auto r = random_state(3, rng);
  const auto s = random_state(3, rng);
  const auto w = random_state(3, rng);
  EXPECT_LE(frob(complementary_state(Ensemble({0.3, 0.7}, {r, s}), 0), s), 1e-15);
  const Ensemble three({1.0 / 3, 1.0 / 3, 1.0 / 3}, {r, s, w});
  EXPECT_LE(frob(complementary_state(three, 0), DensityMatrix::mix(0.5, s, w)), 1e-15);
  EXPECT_THROW(complementary_state(Ensemble({1.0}, {r}), 0), DomainError);
  for (int k = 0; k < 20; ++k) {
    std::vector<DensityMatrix> st;
    for (int i = 0; i < 4; ++i) st.push_back(random_state(3, rng));
    const Ensemble e(random_probabilities(4, rng), st);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(complementary_state(e, i).trace(), 1.0, 1e-12);
  }
}

TEST(HolevoChi, Examples) {
  Rng rng = make_stream(4);
  const auto rho = random_state(3, rng);
  EXPECT_NEAR(holevo_chi(Ensemble({0.2, 0.8}, {rho, rho})), 0.0, 1e-13);
  EXPECT_NEAR(holevo_chi(Ensemble({1.0}, {rho})), 0.0, 1e-15);
  const std::vector<double> p{0.2, 0.3, 0.5};
  const Ensemble orth(p, {diag_state({1, 0, 0}), diag_state({0, 1, 0}), diag_state({0, 0, 1})});
  EXPECT_NEAR(holevo_chi(orth), shannon_entropy(p), 1e-14);
}

TEST(HolevoChi, ThreeFormsAgree) {
  Rng rng = make_stream(5);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 2 + k % 3;
    std::vector<DensityMatrix> st;
    for (std::size_t i = 0; i < n; ++i) st.push_back(random_state(2 + k % 4, rng, k % 2 ? 1 : 0));
    const auto f = holevo_chi_forms(Ensemble(random_probabilities(n, rng), st));
    EXPECT_NEAR(f.entropy, f.relative_entropy, 1e-9);
    EXPECT_NEAR(f.entropy, f.skew, 1e-9);
  }
}

TEST(ChiBounds, IdenticalStates) {
  Rng rng = make_stream(6);
  const auto rho = random_state(3, rng);
  const auto b = chi_upper_bounds(Ensemble({0.4, 0.6}, {rho, rho}));
  EXPECT_NEAR(b.chi, 0.0, 1e-13);
  EXPECT_GE(b.complement_trace_bound, b.chi - 1e-13);
  EXPECT_GE(b.pairwise_bound, b.chi - 1e-13);
  EXPECT_GE(b.entropy_times_t, b.chi - 1e-13);
  EXPECT_GE(*b.roga_bound, b.chi - 1e-13);
}

TEST(ChiBounds, OrthogonalPureBinaryIsTight) {
  const auto b = chi_upper_bounds(Ensemble({0.5, 0.5}, {diag_state({1, 0}), diag_state({0, 1})}));
  const double l2 = std::log(2.0);
  EXPECT_NEAR(b.chi, l2, 1e-15);
  EXPECT_NEAR(b.entropy_times_t, l2, 1e-15);
  EXPECT_NEAR(b.max_pairwise_distance, 1.0, 1e-15);
  EXPECT_NEAR(*b.fidelity, 0.0, 1e-15);
  EXPECT_NEAR(*b.roga_bound, l2, 1e-15);
  EXPECT_NEAR(b.pairwise_bound, l2, 1e-15);
  EXPECT_NEAR(b.complement_trace_bound, l2, 1e-15);
}

TEST(ChiBounds, ChainOnRandomBinaryEnsembles) {
  Rng rng = make_stream(7);
  for (int k = 0; k < 100; ++k) {
    const Ensemble e(random_probabilities(2, rng), {random_state(3, rng), random_state(3, rng)});
    const auto b = chi_upper_bounds(e);
    EXPECT_LE(b.chi, b.pairwise_bound + 1e-8);
    EXPECT_LE(b.pairwise_bound, b.entropy_times_t + 1e-8);
    EXPECT_LE(*b.roga_bound, *b.entropy_times_fidelity_distance + 1e-8);
  }
}

TEST(ChiContinuity, EqualEnsemblesGiveZeros) {
  Rng rng = make_stream(8);
  const Ensemble e(random_probabilities(3, rng), {random_state(2, rng), random_state(2, rng), random_state(2, rng)});
  const auto c = chi_continuity_bound(e, e);
  EXPECT_EQ(c.delta_chi, 0.0);
  EXPECT_EQ(c.max_distance, 0.0);
  EXPECT_EQ(c.weighted_bound, 0.0);
  EXPECT_EQ(c.dimension_free_bound, 0.0);
  for (double x : c.complement_distance) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(ChiContinuity, PerturbedEnsembles) {
  Rng rng = make_stream(9);
  for (int k = 0; k < 50; ++k) {
    const auto w = random_probabilities(3, rng);
    std::vector<DensityMatrix> a;
    std::vector<DensityMatrix> b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(random_state(4, rng));
      b.push_back(DensityMatrix::mix(0.8, a.back(), random_state(4, rng)));
    }
    const auto c = chi_continuity_bound(Ensemble(w, a), Ensemble(w, b));
    EXPECT_LE(c.delta_chi, c.weighted_bound + 1e-8);
    EXPECT_LE(c.weighted_bound, c.dimension_free_bound + 1e-8);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LE(c.complement_distance[i], c.complement_weighted_bound[i] + 1e-12);
      EXPECT_LE(c.complement_weighted_bound[i], c.complement_max_bound[i] + 1e-12);
    }
  }
}

TEST(ChiContinuity, WeightMismatchIsDomainError) {
  Rng rng = make_stream(10);
  const auto a = random_state(2, rng);
  const auto b = random_state(2, rng);
  EXPECT_THROW(chi_continuity_bound(Ensemble({0.5, 0.5}, {a, b}), Ensemble({0.4, 0.6}, {a, b})), DomainError);
}

TEST(Evolve, Examples) {
  Rng rng = make_stream(11);
  const auto rho = random_state(3, rng);
  const auto h = random_hamiltonian(3, rng);
  EXPECT_LE(frob(evolve(rho, h, 0.0), rho), 1e-15);
  const auto d = diag_state({0.2, 0.3, 0.5});
  EXPECT_LE(frob(evolve(d, HermitianOperator::diagonal({1.0, -2.0, 0.5}), 0.7), d), 1e-15);
  for (double t : {0.01, 0.3, 1.0}) EXPECT_LE(trace_distance(evolve(rho, h, t), rho), t * operator_norm(h) + 1e-8);
}

TEST(MixingRate, Examples) {
  Rng rng = make_stream(12);
  const auto a = random_state(3, rng);
  const auto b = random_state(3, rng);
  const auto z = HermitianOperator::zero(3);
  EXPECT_NEAR(mixing_rate(MixingExperiment(Ensemble({0.4, 0.6}, {a, b}), z, z, 0.0)), 0.0, 1e-15);
  const auto h = random_hamiltonian(3, rng);
  EXPECT_NEAR(mixing_rate(MixingExperiment(Ensemble({0.4, 0.6}, {a, a}), h, h, 0.0)), 0.0, 1e-13);
  const auto h2 = random_hamiltonian(3, rng);
  const MixingExperiment m(Ensemble({0.4, 0.6}, {a, b}), h, h2, 0.0);
  EXPECT_NEAR(mixing_rate(m), mixing_rate_finite_difference(m), 1e-5);
}

TEST(MixingExperimentType, Validation) {
  Rng rng = make_stream(13);
  const auto a = random_state(2, rng);
  const auto h = random_hamiltonian(2, rng);
  EXPECT_THROW(MixingExperiment(Ensemble({0.2, 0.3, 0.5}, {a, a, a}), h, h, 0.1), DomainError);
  EXPECT_THROW(MixingExperiment(Ensemble({0.5, 0.5}, {a, a}), random_hamiltonian(3, rng), h, 0.1), DomainError);
  EXPECT_THROW(MixingExperiment(Ensemble({0.5, 0.5}, {a, a}), h, h, -1.0), DomainError);
}

TEST(Sim, Examples) {
  Rng rng = make_stream(14);
  const auto a = random_state(3, rng);
  const auto b = random_state(3, rng);
  const auto h1 = random_hamiltonian(3, rng);
  const auto h2 = random_hamiltonian(3, rng);
  const auto at_zero = sim_bound_check(MixingExperiment(Ensemble({0.3, 0.7}, {a, b}), h1, h2, 0.0));
  EXPECT_NEAR(at_zero.entropy_gain, 0.0, 1e-14);
  EXPECT_LE(at_zero.entropy_gain, at_zero.sim_bound + 1e-14);
  const auto no_h = sim_bound_check(MixingExperiment(Ensemble({0.3, 0.7}, {a, b}), h1, h1, 0.8));
  EXPECT_NEAR(no_h.entropy_gain, 0.0, 1e-13);
  EXPECT_THROW(sim_bound_check(MixingExperiment(Ensemble({1.0}, {a}), h1, h2, 0.5)), DomainError);
}

TEST(Sim, RandomBinaryExperiments) {
  Rng rng = make_stream(15);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t d = 2 + k % 5;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MixingExperiment m(Ensemble(random_probabilities(2, rng), {random_state(d, rng), random_state(d, rng)}),
                             u(rng) * random_hamiltonian(d, rng), u(rng) * random_hamiltonian(d, rng),
                             1e-3 + (1.0 - 1e-3) * u(rng));
    const auto r = sim_bound_check(m);
    EXPECT_LE(r.entropy_gain, r.sim_bound + 1e-8);
    EXPECT_LE(r.sd_representation_residual, 1e-8);
    for (const auto& s : r.unitary_shift) EXPECT_LE(s.lhs, s.rhs + 1e-8);
  }
}
