#include <catch_amalgamated.hpp>

#include <cmath>

#include "meanlab/means.hpp"

using namespace meanlab;
using Catch::Matchers::WithinAbs;

namespace {

double dist(const Matrix& a, const Matrix& b) { return (a - b).frobenius_norm(); }

PdMatrix scalar(double v, std::size_t n = 2) {
  return PdMatrix::certify(Matrix::identity(n) * v);
}

std::vector<MeanKind> all_kinds() {
  return {MeanKind::arithmetic(),          MeanKind::harmonic(),
          MeanKind::geometric(),           MeanKind::kubo_ando_power(0.5),
          MeanKind::kubo_ando_power(-0.5), MeanKind::conventional_power(0.5),
          MeanKind::conventional_power(-0.7), MeanKind::spectral_geometric(),
          MeanKind::wasserstein()};
}

}  // namespace

TEST_CASE("mean examples") {
  CHECK(dist(mean(MeanKind::arithmetic(), scalar(2), scalar(6)), scalar(4)) < 1e-15);
  CHECK(dist(mean(MeanKind::harmonic(), scalar(2), scalar(6)), scalar(3)) < 1e-14);
  CHECK(dist(mean(MeanKind::kubo_ando_power(0.5), PdMatrix::diagonal({1, 4}),
                  PdMatrix::diagonal({9, 16})),
             Matrix::diagonal({4, 9})) < 1e-13);
  CHECK(dist(mean(MeanKind::geometric(), PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({4, 1})),
             scalar(2)) < 1e-14);
  CHECK(dist(mean(MeanKind::wasserstein(), scalar(1), scalar(9)), scalar(4)) < 1e-14);
}

TEST_CASE("MeanKind validates the power parameter") {
  CHECK_THROWS_AS(MeanKind::kubo_ando_power(0.0), DomainError);
  CHECK_THROWS_AS(MeanKind::kubo_ando_power(1e-7), DomainError);
  CHECK_THROWS_AS(MeanKind::conventional_power(1.5), DomainError);
  CHECK_NOTHROW(MeanKind::kubo_ando_power(-1.0));
  CHECK(MeanKind::parse("kubo-ando", 0.5).name() == "kubo-ando(p=0.5)");
  CHECK_THROWS_AS(MeanKind::parse("kubo-ando"), DomainError);
  CHECK_THROWS_AS(MeanKind::parse("nope"), DomainError);
}

TEST_CASE("mean rejects mismatched dimensions") {
  CHECK_THROWS_AS(mean(MeanKind::geometric(), scalar(1, 2), scalar(1, 3)), DimMismatch);
}

TEST_CASE("wasserstein_alt examples") {
  CHECK(dist(wasserstein_alt(scalar(1), scalar(9)), scalar(4)) < 1e-14);
  const PdMatrix a = PdMatrix::certify(Matrix::from_rows({{2.0, Complex(0.3, 0.1)}, {Complex(0.3, -0.1), 1.0}}));
  CHECK(dist(wasserstein_alt(a, a), a) < 1e-13);
  const auto [sz, sx, u] = pauli_basis();
  const PdMatrix ae = PdMatrix::certify(HermitianMatrix::identity(2) + 0.5 * sz);
  const PdMatrix be = PdMatrix::certify(HermitianMatrix::identity(2) + 0.5 * sx);
  CHECK(dist(wasserstein_alt(ae, be), mean(MeanKind::wasserstein(), ae, be)) <= 1e-11);
}

TEST_CASE("kubo_ando_from_function examples") {
  Rng rng = sample_rng(1, 0);
  const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
  const RepresentingFunction arith([](double t) { return 0.5 * (1 + t); }, "(1+t)/2");
  CHECK(dist(kubo_ando_from_function(arith, a, b), mean(MeanKind::arithmetic(), a, b)) < 1e-12);

  const RepresentingFunction root([](double t) { return std::sqrt(t); }, "sqrt");
  CHECK(dist(kubo_ando_from_function(root, PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({4, 1})),
             scalar(2)) < 1e-14);

  const RepresentingFunction harm([](double t) { return 2 * t / (1 + t); }, "2t/(1+t)");
  CHECK(dist(kubo_ando_from_function(harm, scalar(2), scalar(6)), scalar(3)) < 1e-14);

  for (double p : {-0.9, -0.3, 0.4, 0.8}) {
    const RepresentingFunction gp(
        [p](double t) { return std::pow(0.5 * (1 + std::pow(t, p)), 1 / p); }, "g_p");
    CHECK(dist(kubo_ando_from_function(gp, a, b), mean(MeanKind::kubo_ando_power(p), a, b)) <
          1e-12);
  }

  CHECK_THROWS_AS(RepresentingFunction([](double t) { return t + 1; }, "bad"), DomainError);
}

TEST_CASE("representing_function_of examples") {
  CHECK_THAT(representing_function_of(MeanKind::geometric(), 4), WithinAbs(2, 1e-12));
  CHECK_THAT(representing_function_of(MeanKind::kubo_ando_power(0.5), 9), WithinAbs(4, 1e-12));
  for (double t : {0.5, 2.0, 10.0})
    CHECK_THAT(representing_function_of(MeanKind::arithmetic(), t), WithinAbs((1 + t) / 2, 1e-12));
  for (double t : {0.3, 1.7})
    CHECK_THAT(representing_function_of(MeanKind::harmonic(), t),
               WithinAbs(MeanKind::harmonic().representing_value(t), 1e-12));
  CHECK_THROWS_AS(representing_function_of(MeanKind::wasserstein(), 2), NotKuboAndo);
  CHECK_THROWS_AS(representing_function_of(MeanKind::spectral_geometric(), 2), NotKuboAndo);
  CHECK_THROWS_AS(representing_function_of(MeanKind::conventional_power(0.5), 2), NotKuboAndo);
}

TEST_CASE("ando_variational_certificate examples") {
  CHECK(ando_variational_certificate(scalar(1), scalar(1), HermitianMatrix::identity(2)));
  CHECK(ando_variational_certificate(PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({4, 1}),
                                     2.0 * HermitianMatrix::identity(2)));
  CHECK_FALSE(
      ando_variational_certificate(scalar(1), scalar(1), 1.05 * HermitianMatrix::identity(2)));
  CHECK_THROWS_AS(
      ando_variational_certificate(scalar(1, 3), scalar(1), HermitianMatrix::identity(2)),
      DimMismatch);

  for (int k = 0; k < 20; ++k) {
    Rng rng = sample_rng(2, k);
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    const PdMatrix g = mean(MeanKind::geometric(), a, b);
    CHECK(ando_variational_certificate(a, b, g));
    const double delta = 0.05 * a.frobenius_norm();
    CHECK_FALSE(ando_variational_certificate(
        a, b, g.hermitian() + delta * HermitianMatrix::identity(2)));
  }
}

TEST_CASE("axiom suite examples") {
  const auto r1 = check_kubo_ando_axioms(MeanKind::kubo_ando_power(0.5), 200, 1, 2);
  for (const auto& ax : r1.axioms) {
    INFO(ax.axiom << " worst " << ax.worst_violation);
    CHECK(ax.failures == 0);
    CHECK(ax.samples == 200);
  }
  const auto r2 = check_kubo_ando_axioms(MeanKind::harmonic(), 200, 2, 3);
  CHECK(r2.all_passed());

  const auto r3 = check_kubo_ando_axioms(MeanKind::arithmetic(), 40, 3, 2);
  CHECK(r3.axioms[3].axiom == "transformer_equality");
  CHECK(r3.axioms[3].worst_violation < 1e-13);

  CHECK_THROWS_AS(check_kubo_ando_axioms(MeanKind::wasserstein(), 1, 0), NotKuboAndo);
}

TEST_CASE("axiom suite detects a non-monotone representing function") {
  // t^2 is not operator monotone; the induced mean breaks the transformer or monotonicity axioms
  const RepresentingFunction sq([](double t) { return t * t; }, "t^2");
  const auto r = check_kubo_ando_axioms(MeanKind::from_function(sq), 60, 4, 2);
  CHECK_FALSE(r.all_passed());
}

TEST_CASE("idempotence for every kind") {
  for (const auto& kind : all_kinds())
    for (int k = 0; k < 10; ++k) {
      Rng rng = sample_rng(10, k);
      const PdMatrix a = random_pd(3, rng);
      INFO(kind.name());
      CHECK(dist(mean(kind, a, a), a) <= 1e-11 * std::max(1.0, a.frobenius_norm()));
    }
}

TEST_CASE("commuting pairs: Kubo-Ando, conventional, Wasserstein, spectral") {
  for (int k = 0; k < 50; ++k) {
    Rng rng = sample_rng(12, k);
    const auto [a, b] = random_commuting_pair(2, rng);
    for (double p : {0.5, -0.5, 0.9}) {
      CHECK(dist(mean(MeanKind::kubo_ando_power(p), a, b),
                 mean(MeanKind::conventional_power(p), a, b)) <= 1e-10);
    }
    CHECK(dist(mean(MeanKind::wasserstein(), a, b), mean(MeanKind::conventional_power(0.5), a, b)) <=
          1e-10);
    CHECK(dist(mean(MeanKind::spectral_geometric(), a, b), mean(MeanKind::geometric(), a, b)) <=
          1e-10);
  }
}

TEST_CASE("symmetry of m_p and the Wasserstein mean") {
  for (int k = 0; k < 30; ++k) {
    Rng rng = sample_rng(13, k);
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    for (const auto& kind : {MeanKind::kubo_ando_power(0.3), MeanKind::kubo_ando_power(-0.8),
                             MeanKind::wasserstein()})
      CHECK(dist(mean(kind, a, b), mean(kind, b, a)) <= 1e-10);
  }
}

TEST_CASE("inversion duality of power means") {
  for (int k = 0; k < 30; ++k) {
    Rng rng = sample_rng(14, k);
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    for (double p : {0.2, 0.5, 1.0}) {
      const PdMatrix lhs = mean(MeanKind::kubo_ando_power(-p), a, b);
      const PdMatrix rhs = minv(mean(MeanKind::kubo_ando_power(p), minv(a), minv(b)));
      CHECK(dist(lhs, rhs) <= 1e-10 * std::max(1.0, lhs.frobenius_norm()));
    }
  }
}

TEST_CASE("two Wasserstein formulas agree on non-commuting pairs") {
  for (int k = 0; k < 50; ++k) {
    Rng rng = sample_rng(15, k);
    const PdMatrix a = random_pd(2 + k % 2, rng), b = random_pd(2 + k % 2, rng);
    CHECK(dist(mean(MeanKind::wasserstein(), a, b), wasserstein_alt(a, b)) <=
          1e-11 * std::max(1.0, a.frobenius_norm()));
  }
}

TEST_CASE("harmonic, geometric, arithmetic ordering") {
  for (int k = 0; k < 30; ++k) {
    Rng rng = sample_rng(16, k);
    const PdMatrix a = random_pd(3, rng), b = random_pd(3, rng);
    const auto h = mean(MeanKind::harmonic(), a, b);
    const auto g = mean(MeanKind::geometric(), a, b);
    const auto m = mean(MeanKind::arithmetic(), a, b);
    CHECK(loewner_leq(h, g, 1e-10 * m.frobenius_norm()));
    CHECK(loewner_leq(g, m, 1e-10 * m.frobenius_norm()));
  }
}
