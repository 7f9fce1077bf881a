#pragma once

// Commutation of a mean with the arithmetic mean, centrality probes, and the
// chains of identities that reduce the commutation to [A, B] = 0.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "meanlab/matrix.hpp"
#include "meanlab/means.hpp"
#include "meanlab/random.hpp"

namespace meanlab {

inline constexpr double kDerivativeStep = 1e-4;
inline constexpr double kDerivativeTol = 1e-5;

inline double comm_tol(const PdMatrix& a, const PdMatrix& b) {
  return 1e-9 * std::max(1.0, a.frobenius_norm() * b.frobenius_norm());
}

namespace detail {

inline void require_centrality_kind(const MeanKind& kind) {
  if (kind.tag() == MeanTag::Wasserstein) return;
  if (kind.tag() == MeanTag::KuboAndoPower && kind.p() < 1.0) return;
  if (kind.tag() == MeanTag::Harmonic) return;
  throw DomainError("centrality: kind must be wasserstein or kubo-ando with p in [-1, 1), got " +
                    kind.name());
}

inline double gap(const Matrix& lhs, const Matrix& rhs) { return (lhs - rhs).frobenius_norm(); }

}  // namespace detail

// ||[(A + B)/2, A s B]||_F
inline double arith_mean_commutator(const MeanKind& kind, const PdMatrix& a, const PdMatrix& b) {
  detail::require_centrality_kind(kind);
  const Matrix m = mean(kind, a, b).matrix();
  const Matrix am = (a.matrix() + b.matrix()) * 0.5;
  return commutator(am, m).frobenius_norm();
}

struct CommutatorReport {
  std::uint64_t pair_id = 0;
  double commutator_norm = 0.0;
  double tolerance = 0.0;
  bool commutes = false;
};

struct ProbeResult {
  std::string kind;
  bool central = true;
  double worst = 0.0;
  std::vector<CommutatorReport> reports;
};

// B_i = M*M + 0.1 I drawn from (seed, i).
inline ProbeResult centrality_probe_report(const PdMatrix& a, const MeanKind& kind, int samples,
                                           std::uint64_t seed) {
  detail::require_centrality_kind(kind);
  ProbeResult out{kind.name(), true, 0.0, {}};
  for (int i = 0; i < samples; ++i) {
    Rng rng = sample_rng(seed, static_cast<std::uint64_t>(i));
    const PdMatrix b = random_pd(a.dim(), rng);
    const double c = arith_mean_commutator(kind, a, b);
    const double tol = comm_tol(a, b);
    out.reports.push_back({static_cast<std::uint64_t>(i), c, tol, c <= tol});
    out.worst = std::max(out.worst, c);
    if (c > tol) out.central = false;
  }
  return out;
}

inline bool centrality_probe(const PdMatrix& a, const MeanKind& kind, int samples, std::uint64_t seed) {
  return centrality_probe_report(a, kind, samples, seed).central;
}

// ---------------------------------------------------------------------------
// Identity chains

struct Gap {
  std::string name;
  double value = 0.0;
};

struct ChainReport {
  std::string label;
  double tolerance = 0.0;     // comm_tol of the pair
  std::vector<Gap> gaps;      // commutation-type links; gaps.front() is the hypothesis
  std::vector<Gap> identities;  // algebraic identities used along the way (always ~0)
  double derivative_gap = 0.0;  // finite-difference estimate of the first-order term
  double derivative_error = -1.0;  // relative error against the exact derivative, when known

  double hypothesis_gap() const { return gaps.front().value; }

  bool all_at_most(double tol) const {
    for (const auto& g : gaps)
      if (!(g.value <= tol)) return false;
    return true;
  }
  bool all_above(double floor) const {
    for (const auto& g : gaps)
      if (!(g.value > floor)) return false;
    return true;
  }
  // Every link vanishes or none does.
  bool consistent() const { return all_at_most(tolerance) || all_above(tolerance); }

  double gap(const std::string& name) const {
    for (const auto& g : gaps)
      if (g.name == name) return g.value;
    for (const auto& g : identities)
      if (g.name == name) return g.value;
    throw DomainError("chain report has no gap named '" + name + "'");
  }
};

namespace detail {

inline void require_dim2(const PdMatrix& a, const PdMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) throw DimMismatch("identity chains work in M_2");
}

// (A + R)^2 (I + X) A - A (I + X) (A + R)^2 with R = sign * (A^{1/2} B A^{1/2})^{1/2},
// X = A^{-1/2} B A^{-1/2}
inline Matrix ariwas_difference(const PdMatrix& a, const PdMatrix& b, double sign = 1.0) {
  const PdMatrix ah = msqrt(a);
  const PdMatrix aih = minv(ah);
  const Matrix r = msqrt(PdMatrix::certify(HermitianMatrix(ah.matrix() * b.matrix() * ah.matrix())))
                       .matrix() * sign;
  const Matrix id = Matrix::identity(a.dim());
  const Matrix ix = id + aih.matrix() * b.matrix() * aih.matrix();
  const Matrix s = a.matrix() + r;
  const Matrix s2 = s * s;
  return s2 * ix * a.matrix() - a.matrix() * ix * s2;
}

inline PdMatrix scaled(const PdMatrix& b, double c) {
  return PdMatrix::certify(HermitianMatrix(b.matrix() * c));
}

}  // namespace detail

inline ChainReport remark1_identity_chain(const PdMatrix& a, const PdMatrix& b) {
  detail::require_dim2(a, b);
  ChainReport rep;
  rep.label = "wasserstein vs arithmetic";
  rep.tolerance = comm_tol(a, b);
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  const PdMatrix ah = msqrt(a);
  const Matrix r = msqrt(PdMatrix::certify(HermitianMatrix(ah.matrix() * bm * ah.matrix()))).matrix();
  const Matrix a2 = am * am;

  rep.gaps.push_back({"ariwas", detail::ariwas_difference(a, b).frobenius_norm()});
  rep.gaps.push_back({"A2R-RA2", detail::gap(a2 * r, r * a2)});
  rep.gaps.push_back({"A2B-BA2", detail::gap(a2 * bm, bm * a2)});
  rep.gaps.push_back({"AB-BA", detail::gap(am * bm, bm * am)});
  rep.identities.push_back(
      {"hypothesis", arith_mean_commutator(MeanKind::wasserstein(), a, b)});

  // B -> t^2 B: the first-order term of the difference is R A^2 - A^2 R.
  // Central difference on the analytic branch R_t = t R.
  const double h = kDerivativeStep;
  const PdMatrix bh = detail::scaled(b, h * h);
  const Matrix fd = (detail::ariwas_difference(a, bh, 1.0) - detail::ariwas_difference(a, bh, -1.0)) /
                    (2.0 * h);
  const Matrix exact = r * a2 - a2 * r;
  rep.derivative_gap = fd.frobenius_norm();
  rep.derivative_error = (fd - exact).frobenius_norm() / std::max(1.0, exact.frobenius_norm());
  return rep;
}

inline ChainReport remark2_identity_chain(const PdMatrix& a, const PdMatrix& b, double p) {
  detail::require_dim2(a, b);
  if (!(p >= -1.0 && p < 1.0) || std::abs(p) < kPowerMin)
    throw DomainError("remark2 chain: p must lie in [-1, 1) \\ {0}");
  ChainReport rep;
  rep.tolerance = comm_tol(a, b);
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  const Matrix id = Matrix::identity(2);
  const MeanKind kind = MeanKind::kubo_ando_power(p);
  rep.gaps.push_back({"hypothesis", arith_mean_commutator(kind, a, b)});

  if (p == -1.0) {
    rep.label = "harmonic vs arithmetic";
    const Matrix ai = minv(a).matrix();
    const Matrix bi = minv(b).matrix();
    const Matrix h = inverse(ai + bi) * 2.0;
    rep.gaps.push_back({"harmonic_vs_arithmetic", commutator(h, (am + bm) * 0.5).frobenius_norm()});
    rep.gaps.push_back({"(A+B)(A^-1+B^-1)", commutator(am + bm, ai + bi).frobenius_norm()});
    rep.gaps.push_back({"AB^-1+BA^-1-A^-1B-B^-1A", (am * bi + bm * ai - ai * bm - bi * am).frobenius_norm()});

    // P(t) = t [(A + tB)(A^-1 + (tB)^-1) - (A^-1 + (tB)^-1)(A + tB)] = c0 + c2 t^2;
    // the constant coefficient is A B^-1 - B^-1 A.
    const double ts[] = {0.5, 1.0, 1.5, 2.0};
    Matrix n(3);
    std::vector<Matrix> rhs(3, Matrix(2));
    for (double t : ts) {
      const Matrix tb = bm * t;
      const Matrix tbi = bi / t;
      const Matrix pt = ((am + tb) * (ai + tbi) - (ai + tbi) * (am + tb)) * t;
      const double row[3] = {1.0, t, t * t};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) n(i, j) += row[i] * row[j];
        rhs[i] += pt * row[i];
      }
    }
    const Matrix ninv = inverse(n);
    Matrix c0(2);
    for (int j = 0; j < 3; ++j) c0 += rhs[j] * ninv(0, j);
    rep.gaps.push_back({"polynomial_c0", c0.frobenius_norm()});
    rep.gaps.push_back({"AB^-1-B^-1A", commutator(am, bi).frobenius_norm()});
    rep.gaps.push_back({"AB-BA", commutator(am, bm).frobenius_norm()});
    rep.identities.push_back({"polynomial_c0_vs_commutator", (c0 - commutator(am, bi)).frobenius_norm()});
    return rep;
  }

  const PdMatrix ah = msqrt(a);
  const PdMatrix aih = minv(ah);
  const PdMatrix x = PdMatrix::certify(HermitianMatrix(aih.matrix() * bm * aih.matrix()));
  const double h = kDerivativeStep;

  if (p > 0.0) {
    rep.label = "power mean (p > 0) vs arithmetic";
    // (I + Y^p)^{1/p} A (I + Y) - (I + Y) A (I + Y^p)^{1/p}
    auto display = [&](const PdMatrix& y) {
      const Matrix f = mpow(PdMatrix::certify(HermitianMatrix(id + mpow(y, p).matrix())), 1.0 / p).matrix();
      const Matrix iy = id + y.matrix();
      return f * am * iy - iy * am * f;
    };
    rep.gaps.push_back({"reduced_display", display(x).frobenius_norm()});
    rep.gaps.push_back({"substituted_display", display(b).frobenius_norm()});
    const Matrix bp = mpow(b, p).matrix();
    rep.gaps.push_back({"AB^p-B^pA", commutator(am, bp).frobenius_norm()});
    rep.gaps.push_back({"AB-BA", commutator(am, bm).frobenius_norm()});
    // B -> e^{1/p} B; the first-order term is (1/p)(B^p A - A B^p).
    const Matrix fd = display(detail::scaled(b, std::pow(h, 1.0 / p))) / h;
    const Matrix exact = (bp * am - am * bp) / p;
    rep.derivative_gap = fd.frobenius_norm();
    rep.derivative_error = (fd - exact).frobenius_norm() / std::max(1.0, exact.frobenius_norm());
    return rep;
  }

  // -1 < p < 0 through m_p = (A^-1 m_q B^-1)^-1, q = -p.
  const double q = -p;
  rep.label = "power mean (p < 0) vs arithmetic";
  rep.identities.push_back(
      {"duality", detail::gap(mean(kind, a, b).matrix(),
                              minv(mean(MeanKind::kubo_ando_power(q), minv(a), minv(b))).matrix())});
  // (I + Z^q)^{-1/q} A (I + Y) - (I + Y) A (I + Z^q)^{-1/q}
  auto display = [&](const PdMatrix& z, const PdMatrix& y) {
    const Matrix f =
        mpow(PdMatrix::certify(HermitianMatrix(id + mpow(z, q).matrix())), -1.0 / q).matrix();
    const Matrix iy = id + y.matrix();
    return f * am * iy - iy * am * f;
  };
  const PdMatrix z = PdMatrix::certify(HermitianMatrix(ah.matrix() * minv(b).matrix() * ah.matrix()));
  rep.gaps.push_back({"reduced_display", display(z, x).frobenius_norm()});
  rep.gaps.push_back({"substituted_display", display(minv(b), b).frobenius_norm()});
  const Matrix bq1 = mpow(b, 1.0 + q).matrix();
  rep.gaps.push_back({"AB^(1+q)-B^(1+q)A", commutator(am, bq1).frobenius_norm()});
  rep.gaps.push_back({"AB-BA", commutator(am, bm).frobenius_norm()});
  // B -> (e^{1/q} B)^{-1}, scaled by e^{1/q}:
  //   G(e) = A B^-1 - B^-1 A - (e/q)(B^q A B^-1 - B^-1 A B^q) + ...
  auto g = [&](double e) {
    const PdMatrix be = detail::scaled(b, std::pow(e, 1.0 / q));
    return display(be, minv(be)) * std::pow(e, 1.0 / q);
  };
  const Matrix g0 = commutator(am, minv(b).matrix());
  const Matrix fd = (g(h) - g0) / h;
  const Matrix bq = mpow(b, q).matrix();
  const Matrix bi = minv(b).matrix();
  const Matrix exact = (bq * am * bi - bi * am * bq) * (-1.0 / q);
  rep.derivative_gap = fd.frobenius_norm();
  rep.derivative_error = (fd - exact).frobenius_norm() / std::max(1.0, exact.frobenius_norm());
  return rep;
}

}  // namespace meanlab
