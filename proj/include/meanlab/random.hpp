#pragma once

// Seeded sampling of test matrices. Every sample draws from its own engine
// seeded by (seed, index), so results do not depend on evaluation order.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "meanlab/matrix.hpp"

namespace meanlab {

using Rng = std::mt19937_64;

inline Rng sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// Entries are standard complex Gaussians (E|z|^2 = 1).
inline Matrix random_gaussian_matrix(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

// M*M + 0.1 I keeps the condition number bounded.
inline PdMatrix random_pd(std::size_t n, Rng& rng) {
  const Matrix m = random_gaussian_matrix(n, rng);
  return PdMatrix::certify(HermitianMatrix(m.adjoint() * m + Matrix::identity(n) * 0.1));
}

inline HermitianMatrix random_psd(std::size_t n, Rng& rng) {
  const Matrix m = random_gaussian_matrix(n, rng);
  return HermitianMatrix(m.adjoint() * m);
}

inline HermitianMatrix random_hermitian(std::size_t n, Rng& rng) {
  const Matrix m = random_gaussian_matrix(n, rng);
  return HermitianMatrix(m + m.adjoint());
}

// Modified Gram-Schmidt on a Gaussian matrix; the phase of each column is fixed
// so that R has a positive real diagonal, which makes the map deterministic.
inline Matrix random_unitary(std::size_t n, Rng& rng) {
  Matrix q = random_gaussian_matrix(n, rng);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      Complex dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += std::conj(q(r, prev)) * q(r, c);
      for (std::size_t r = 0; r < n; ++r) q(r, c) -= dot * q(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) norm += std::norm(q(r, c));
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) q(r, c) /= norm;
  }
  return q;
}

// Hermitian, invertible, indefinite in general: W diag(+-(0.5 + u)) W*, u in [0, 1).
inline HermitianMatrix random_hermitian_invertible(std::size_t n, Rng& rng) {
  const Matrix w = random_unitary(n, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  Matrix d(n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = (sign(rng) ? 1.0 : -1.0) * (0.5 + u(rng));
  return HermitianMatrix(w * d * w.adjoint());
}

// Pair diagonal in a common random eigenbasis.
inline std::pair<PdMatrix, PdMatrix> random_commuting_pair(std::size_t n, Rng& rng) {
  const Matrix w = random_unitary(n, rng);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  Matrix da(n), db(n);
  for (std::size_t i = 0; i < n; ++i) {
    da(i, i) = u(rng);
    db(i, i) = u(rng);
  }
  return {PdMatrix::certify(HermitianMatrix(w * da * w.adjoint())),
          PdMatrix::certify(HermitianMatrix(w * db * w.adjoint()))};
}

}  // namespace meanlab
