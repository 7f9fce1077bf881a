#pragma once

// Bures-Wasserstein distance and the two geodesics through a pair of positive
// definite matrices.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "meanlab/matrix.hpp"
#include "meanlab/means.hpp"

namespace meanlab {

inline constexpr double kRadicandClamp = 1e-10;

// (tr A + tr B - 2 tr (A^{1/2} B A^{1/2})^{1/2})^{1/2}
// The radicand is formed as displayed to detect numerical violations; the
// value itself is ||A^{1/2} - U B^{1/2}||_F with U the adjoint polar factor of
// B^{1/2} A^{1/2}, which equals the square root of the radicand but avoids its
// cancellation near A = B.
inline double d_bw(const PdMatrix& a, const PdMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch("d_bw: dimension mismatch");
  const PdMatrix ah = msqrt(a), bh = msqrt(b);
  const PdMatrix inner = PdMatrix::certify(HermitianMatrix(ah.matrix() * b.matrix() * ah.matrix()));
  double cross = 0.0;
  for (double l : inner.spectrum().eigenvalues) cross += std::sqrt(l);
  const double radicand = a.trace() + b.trace() - 2.0 * cross;
  if (radicand < -kRadicandClamp)
    throw NegativeRadicand("d_bw: radicand " + std::to_string(radicand) + " is negative");
  if (radicand <= 0.0) return 0.0;
  const Matrix m = bh.matrix() * ah.matrix();
  const PdMatrix modulus = msqrt(PdMatrix::certify(HermitianMatrix(m.adjoint() * m)));
  const Matrix u = (m * minv(modulus).matrix()).adjoint();
  return (ah.matrix() - u * bh.matrix()).frobenius_norm();
}

enum class GeodesicKind { GeometricTrace, BuresWasserstein };

inline GeodesicKind parse_geodesic_kind(const std::string& name) {
  if (name == "trace" || name == "geometric") return GeodesicKind::GeometricTrace;
  if (name == "bw" || name == "bures-wasserstein") return GeodesicKind::BuresWasserstein;
  throw DomainError("unknown geodesic kind '" + name + "' (expected bw or trace)");
}

inline std::string to_string(GeodesicKind k) {
  return k == GeodesicKind::GeometricTrace ? "trace" : "bw";
}

// GeometricTrace:   A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}
// BuresWasserstein: (1-t)^2 A + t^2 B + t(1-t)(A G + G A),  G = A^{-1} # B
inline PdMatrix geodesic(GeodesicKind kind, const PdMatrix& a, const PdMatrix& b, double t) {
  if (a.dim() != b.dim()) throw DimMismatch("geodesic: dimension mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic: t must lie in [0, 1]");
  if (t == 0.0) return a;
  if (kind == GeodesicKind::GeometricTrace) {
    return detail::certify_result(
        detail::kubo_ando_sandwich(a, b, [t](double x) { return std::pow(x, t); }),
        "trace geodesic");
  }
  if (t == 1.0) return b;
  const Matrix g = geometric_mean(minv(a), b).matrix();
  const Matrix& am = a.matrix();
  const double s = 1.0 - t;
  return detail::certify_result(am * (s * s) + b.matrix() * (t * t) + (am * g + g * am) * (t * s),
                                "bures-wasserstein geodesic");
}

// max over consecutive (s, t) of |d(gamma(s), gamma(t)) - (t - s) d(A, B)|
// along the Bures-Wasserstein geodesic.
inline double check_geodesic_metric(const PdMatrix& a, const PdMatrix& b,
                                    const std::vector<double>& partition) {
  if (partition.size() < 2 || !std::is_sorted(partition.begin(), partition.end()) ||
      partition.front() != 0.0 || partition.back() != 1.0)
    throw DomainError("check_geodesic_metric: partition must be sorted and contain 0 and 1");
  const double total = d_bw(a, b);
  std::vector<PdMatrix> pts;
  pts.reserve(partition.size());
  for (double t : partition) pts.push_back(geodesic(GeodesicKind::BuresWasserstein, a, b, t));
  double worst = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = d_bw(pts[i - 1], pts[i]);
    worst = std::max(worst, std::abs(seg - (partition[i] - partition[i - 1]) * total));
  }
  return worst;
}

}  // namespace meanlab
