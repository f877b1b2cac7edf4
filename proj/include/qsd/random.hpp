#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qsd/hermitian.hpp"

namespace qsd {

/// The seeded stream every generator takes explicitly.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent per-trial streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t master, Ts... parts) {
  std::uint64_t s = mix_seed(master);
  ((s = mix_seed(s ^ static_cast<std::uint64_t>(parts))), ...);
  return s;
}

inline Rng make_stream(std::uint64_t seed) { return Rng(seed); }

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
inline complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = complex_gaussian(rng);
  return g;
}

/// Q factor of a thin QR by modified Gram-Schmidt with one reorthogonalization
/// pass. R has a positive diagonal, so Q of a Gaussian matrix is Haar.
inline Matrix orthonormal_columns(const Matrix& a) {
  Matrix q = a;
  const std::size_t m = q.rows();
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        complex dot = 0.0;
        for (std::size_t r = 0; r < m; ++r) dot += std::conj(q(r, k)) * q(r, j);
        for (std::size_t r = 0; r < m; ++r) q(r, j) -= dot * q(r, k);
      }
    double nrm = 0.0;
    for (std::size_t r = 0; r < m; ++r) nrm += std::norm(q(r, j));
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0)) throw DomainError("orthonormal_columns: rank-deficient input");
    for (std::size_t r = 0; r < m; ++r) q(r, j) /= nrm;
  }
  return q;
}

/// Haar-random unitary.
inline Matrix random_unitary(std::size_t dim, Rng& rng) { return orthonormal_columns(gaussian_matrix(dim, dim, rng)); }

/// Hilbert-Schmidt random state G G* / tr(G G*), G dim x rank Gaussian.
/// rank < dim gives a rank-deficient state.
inline DensityMatrix random_state(std::size_t dim, Rng& rng, std::size_t rank = 0) {
  if (dim == 0) throw DomainError("random_state: dim must be >= 1");
  if (rank == 0 || rank > dim) rank = dim;
  const Matrix g = gaussian_matrix(dim, rank, rng);
  HermitianOperator w(g * g.adjoint());
  return DensityMatrix::assume_state((1.0 / w.trace()) * w);
}

/// Random pure state |psi><psi| with Haar-distributed psi.
inline DensityMatrix random_pure_state(std::size_t dim, Rng& rng) { return random_state(dim, rng, 1); }

/// Random positive operator with the given trace.
inline PositiveOperator random_positive(std::size_t dim, double trace, Rng& rng, std::size_t rank = 0) {
  return trace * random_state(dim, rng, rank);
}

/// (G + G*)/2 rescaled to unit operator norm.
inline HermitianOperator random_hamiltonian(std::size_t dim, Rng& rng) {
  if (dim == 0) throw DomainError("random_hamiltonian: dim must be >= 1");
  const Matrix g = gaussian_matrix(dim, dim, rng);
  HermitianOperator h(0.5 * (g + g.adjoint()));
  const double nrm = operator_norm(h);
  return (1.0 / nrm) * h;
}

using KrausOperators = std::vector<Matrix>;

/// Random channel on dim_in-level states via a Stinespring isometry: the first
/// dim_in columns of a Haar unitary of size dim_in*dim_env, cut into dim_env
/// row blocks.
inline KrausOperators random_cptp(std::size_t dim_in, std::size_t dim_env, Rng& rng) {
  if (dim_in == 0 || dim_env == 0) throw DomainError("random_cptp: dimensions must be >= 1");
  const std::size_t big = dim_in * dim_env;
  const Matrix g = gaussian_matrix(big, big, rng);
  const Matrix u = orthonormal_columns(g);
  KrausOperators ks;
  ks.reserve(dim_env);
  for (std::size_t e = 0; e < dim_env; ++e) {
    Matrix k(dim_in, dim_in);
    for (std::size_t i = 0; i < dim_in; ++i)
      for (std::size_t j = 0; j < dim_in; ++j) k(i, j) = u(e * dim_in + i, j);
    ks.push_back(std::move(k));
  }
  return ks;
}

/// Probability vector drawn uniformly from the simplex (entries > 0).
inline std::vector<double> random_probabilities(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) {
    do x = ex(rng);
    while (!(x > 0.0));
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace qsd
