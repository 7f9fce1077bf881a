#include <catch_amalgamated.hpp>

#include <cmath>

#include "meanlab/centrality.hpp"

using namespace meanlab;

namespace {

HermitianMatrix id2() { return HermitianMatrix::identity(2); }

PdMatrix pd(const HermitianMatrix& h) { return PdMatrix::certify(h); }

}  // namespace

TEST_CASE("arith_mean_commutator examples") {
  const auto [sz, sx, u] = pauli_basis();
  const auto a = PdMatrix::diagonal({1, 4}), b = PdMatrix::diagonal({9, 16});
  CHECK(arith_mean_commutator(MeanKind::wasserstein(), a, b) <= 1e-12);
  CHECK(arith_mean_commutator(MeanKind::kubo_ando_power(0.5), a, b) <= 1e-12);

  const auto ma = pd(id2() + 0.5 * sz), mb = pd(id2() + 0.5 * sx);
  CHECK(arith_mean_commutator(MeanKind::kubo_ando_power(0.5), ma, mb) <= 1e-11);
  CHECK(arith_mean_commutator(MeanKind::wasserstein(), ma, mb) <= 1e-11);

  // equal traces keep the two means commuting even with mismatched s
  CHECK(arith_mean_commutator(MeanKind::wasserstein(), ma, pd(id2() + 0.7 * sx)) <= 1e-11);
  CHECK(arith_mean_commutator(MeanKind::wasserstein(), ma, pd(2.0 * id2() + 0.7 * sx)) > 1e-3);

  CHECK_THROWS_AS(arith_mean_commutator(MeanKind::kubo_ando_power(1.0), a, b), DomainError);
  CHECK_THROWS_AS(arith_mean_commutator(MeanKind::geometric(), a, b), DomainError);
}

TEST_CASE("centrality_probe examples") {
  const auto [sz, sx, u] = pauli_basis();
  const auto scalar = pd(3.0 * id2());
  for (const auto& kind : {MeanKind::wasserstein(), MeanKind::kubo_ando_power(0.5),
                           MeanKind::kubo_ando_power(-1.0)})
    CHECK(centrality_probe(scalar, kind, 50, 3));

  const auto rep = centrality_probe_report(PdMatrix::diagonal({1, 2}), MeanKind::kubo_ando_power(0.5), 50, 7);
  CHECK_FALSE(rep.central);
  CHECK(rep.worst > 1e-3);
  CHECK(rep.reports.size() == 50);

  CHECK_FALSE(centrality_probe(pd(id2() + 0.9 * sx), MeanKind::wasserstein(), 50, 7));
}

TEST_CASE("CommutatorReport verdicts follow the tolerance") {
  const auto rep = centrality_probe_report(PdMatrix::diagonal({1, 3}), MeanKind::wasserstein(), 20, 1);
  for (const auto& r : rep.reports) CHECK(r.commutes == (r.commutator_norm <= r.tolerance));
}

TEST_CASE("remark1 chain on commuting and generic pairs") {
  const auto [sz, sx, u] = pauli_basis();
  const auto c = remark1_identity_chain(PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({9, 16}));
  CHECK(c.all_at_most(1e-11));

  const auto c2 = remark1_identity_chain(pd(id2() + 0.5 * sx), pd(2.0 * id2() + 0.3 * sx));
  CHECK(c2.all_at_most(1e-11));
  CHECK(c2.derivative_error <= kDerivativeTol);

  const auto g = remark1_identity_chain(PdMatrix::diagonal({1, 4}), pd(id2() + 0.6 * sx));
  CHECK(g.all_above(1e-3));
  CHECK(g.consistent());
  CHECK(g.derivative_error <= kDerivativeTol);
}

TEST_CASE("remark1 chain separates the matched family") {
  const auto [sz, sx, u] = pauli_basis();
  const auto m = remark1_identity_chain(pd(id2() + 0.5 * sz), pd(id2() + 0.5 * sx));
  CHECK(m.hypothesis_gap() <= 1e-11);
  CHECK(m.gap("hypothesis") <= 1e-11);
  CHECK(m.gap("AB-BA") > 1e-3);
  CHECK_FALSE(m.consistent());
}

TEST_CASE("remark1 derivative matches the reduced commutator on random pairs") {
  for (int k = 0; k < 20; ++k) {
    Rng rng = sample_rng(21, k);
    const auto a = random_pd(2, rng), b = random_pd(2, rng);
    const auto r = remark1_identity_chain(a, b);
    CHECK(r.derivative_error <= kDerivativeTol);
    CHECK(r.consistent());
  }
}

TEST_CASE("remark2 chain for p > 0") {
  const auto [sz, sx, u] = pauli_basis();
  const auto c = remark2_identity_chain(PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({9, 16}), 0.5);
  CHECK(c.all_at_most(1e-11));
  const auto g = remark2_identity_chain(PdMatrix::diagonal({1, 4}), pd(id2() + 0.6 * sx), 0.5);
  CHECK(g.gap("AB^p-B^pA") > 1e-3);
  CHECK(g.all_above(1e-3));
  CHECK_THROWS_AS(g.gap("harmonic_vs_arithmetic"), DomainError);
  // first-order extraction: the e^{1/p} = e^2 term leaves an O(h) error
  CHECK(g.derivative_error < 1e-3);
}

TEST_CASE("remark2 chain for p < 0") {
  const auto [sz, sx, u] = pauli_basis();
  const auto c = remark2_identity_chain(PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({9, 16}), -0.5);
  CHECK(c.all_at_most(1e-11));
  CHECK(c.gap("duality") <= 1e-12);
  const auto g = remark2_identity_chain(PdMatrix::diagonal({1, 4}), pd(id2() + 0.6 * sx), -0.5);
  CHECK(g.all_above(1e-3));
  CHECK(g.gap("duality") <= 1e-12);
  CHECK(g.derivative_error < 1e-3);
}

TEST_CASE("remark2 chain for p = -1") {
  const auto [sz, sx, u] = pauli_basis();
  const auto c = remark2_identity_chain(PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({9, 16}), -1.0);
  CHECK(c.all_at_most(1e-11));
  const auto g = remark2_identity_chain(PdMatrix::diagonal({1, 4}), pd(id2() + 0.6 * sx), -1.0);
  CHECK(g.gap("harmonic_vs_arithmetic") > 1e-3);
  CHECK(g.gap("AB^-1-B^-1A") > 1e-3);
  CHECK(g.all_above(1e-3));
  CHECK(g.gap("polynomial_c0_vs_commutator") < 1e-12);

  // matched family: the harmonic mean commutes with the arithmetic mean for
  // this B, yet the t-polynomial exposes [A, B^-1] != 0
  const auto m = remark2_identity_chain(pd(id2() + 0.5 * sz), pd(id2() + 0.5 * sx), -1.0);
  CHECK(m.gap("harmonic_vs_arithmetic") <= 1e-11);
  CHECK(m.gap("polynomial_c0") > 1e-3);
}

TEST_CASE("remark2 chain validates p and dimension") {
  const auto a = PdMatrix::diagonal({1, 4});
  CHECK_THROWS_AS(remark2_identity_chain(a, a, 1.0), DomainError);
  CHECK_THROWS_AS(remark2_identity_chain(a, a, 0.0), DomainError);
  CHECK_THROWS_AS(remark2_identity_chain(a, a, -1.5), DomainError);
  CHECK_THROWS_AS(remark1_identity_chain(PdMatrix::identity(3), PdMatrix::identity(3)), DimMismatch);
}

TEST_CASE("commuting pairs commute with every mean's arithmetic companion") {
  for (int k = 0; k < 30; ++k) {
    Rng rng = sample_rng(22, k);
    const auto [a, b] = random_commuting_pair(2, rng);
    REQUIRE(commutator(a, b).frobenius_norm() <= 1e-12 * std::max(1.0, a.frobenius_norm() * b.frobenius_norm()));
    for (const auto& kind : {MeanKind::wasserstein(), MeanKind::kubo_ando_power(0.5),
                             MeanKind::kubo_ando_power(-0.5), MeanKind::kubo_ando_power(-1.0)})
      CHECK(arith_mean_commutator(kind, a, b) <= 1e-11 * std::max(1.0, a.frobenius_norm() * b.frobenius_norm()));
  }
}

TEST_CASE("non-scalar A fails the probe") {
  for (int k = 0; k < 10; ++k) {
    Rng rng = sample_rng(23, k);
    const auto a = random_pd(2, rng);
    CHECK_FALSE(centrality_probe(a, MeanKind::wasserstein(), 50, 100 + k));
    CHECK_FALSE(centrality_probe(a, MeanKind::kubo_ando_power(0.5), 50, 100 + k));
  }
}

TEST_CASE("square roots commute with the same elements") {
  for (int k = 0; k < 40; ++k) {
    Rng rng = sample_rng(24, k);
    const auto [ca, cb] = random_commuting_pair(2, rng);
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    auto scaled_comm = [](const Matrix& x, const Matrix& y) {
      return commutator(x, y).frobenius_norm() / std::max(1.0, x.frobenius_norm() * y.frobenius_norm());
    };
    const Matrix ca2 = ca.matrix() * ca.matrix();
    CHECK(scaled_comm(ca2, cb) <= 1e-10);
    CHECK(scaled_comm(ca, cb) <= 1e-8);
    const Matrix a2 = a.matrix() * a.matrix();
    CHECK((scaled_comm(a2, b) <= 1e-10) == (scaled_comm(a, b) <= 1e-8));
  }
}

TEST_CASE("inversion duality of the commutation property") {
  // [(A+B)/2, A m_{-p} B] = 0 iff [(A+B)/2, (A^-1 m_p B^-1)^-1] = 0 since the means coincide
  for (int k = 0; k < 20; ++k) {
    Rng rng = sample_rng(25, k);
    const PdMatrix a = random_pd(2, rng);
    // odd k: generic B; even k: B commuting with A
    const PdMatrix bb = k % 2 ? random_pd(2, rng)
                              : PdMatrix::certify(HermitianMatrix(a.matrix() * 0.5 + Matrix::identity(2)));
    for (double p : {0.3, 0.7}) {
      const double neg = arith_mean_commutator(MeanKind::kubo_ando_power(-p), a, bb);
      const Matrix dual = minv(mean(MeanKind::kubo_ando_power(p), minv(a), minv(bb))).matrix();
      const double via = commutator((a.matrix() + bb.matrix()) * 0.5, dual).frobenius_norm();
      CHECK(std::abs(neg - via) <= 1e-10 * std::max(1.0, neg));
      const double tol = comm_tol(a, bb);
      CHECK((neg <= tol) == (via <= tol));
    }
  }
}
