#pragma once

// Perturbative expansions around the identity along
//   A_e = I + e sigma_z,  B_e = I + e sigma_x
// and numerical extraction of their series coefficients.

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "meanlab/checks.hpp"
#include "meanlab/matrix.hpp"
#include "meanlab/means.hpp"

namespace meanlab {

inline constexpr double kEpsMax = 0.2;
inline constexpr double kCoeffTolC1 = 1e-6;
inline constexpr double kCoeffTolC2 = 1e-4;
inline constexpr double kVandermondeCondMax = 1e8;
inline constexpr int kRichardsonLevels = 5;

// ---------------------------------------------------------------------------
// g_p(x) = ((1 + x^p)/2)^{1/p}

namespace detail {

inline void require_gp_args(double p, double x) {
  if (!std::isfinite(p) || std::abs(p) < kPowerMin || std::abs(p) > 1.0)
    throw DomainError("g_p: p must satisfy 1e-6 <= |p| <= 1");
  if (!(x > 0.0)) throw DomainError("g_p: x must be positive");
}

}  // namespace detail

inline double gp_eval(double p, double x) {
  detail::require_gp_args(p, x);
  return detail::gp_value(p, x);
}

// g' = 1/2 h^{1/p-1} x^{p-1} with h = (1 + x^p)/2
inline double gp_d1(double p, double x) {
  detail::require_gp_args(p, x);
  const double h = 0.5 * (1.0 + std::pow(x, p));
  return 0.5 * std::pow(h, 1.0 / p - 1.0) * std::pow(x, p - 1.0);
}

// g'' = 1/2 [(1/p - 1) h^{1/p-2} h' x^{p-1} + (p - 1) h^{1/p-1} x^{p-2}],  h' = p x^{p-1}/2
inline double gp_d2(double p, double x) {
  detail::require_gp_args(p, x);
  const double h = 0.5 * (1.0 + std::pow(x, p));
  const double dh = 0.5 * p * std::pow(x, p - 1.0);
  return 0.5 * ((1.0 / p - 1.0) * std::pow(h, 1.0 / p - 2.0) * dh * std::pow(x, p - 1.0) +
                (p - 1.0) * std::pow(h, 1.0 / p - 1.0) * std::pow(x, p - 2.0));
}

// Closed-form anchor 1/4 (1/p - 1) + (p - 1)/2 for g_p''(1).
// It omits the factor p of h'; the true value is gp_d2(p, 1) = (p - 1)/4.
inline double gp_d2_closed_form_anchor(double p) { return 0.25 * (1.0 / p - 1.0) + 0.5 * (p - 1.0); }

class GpFunction {
 public:
  explicit GpFunction(double p) : p_(p) { detail::require_gp_args(p, 1.0); }
  double p() const noexcept { return p_; }
  double operator()(double x) const { return gp_eval(p_, x); }
  double d1(double x) const { return gp_d1(p_, x); }
  double d2(double x) const { return gp_d2(p_, x); }

 private:
  double p_;
};

// ---------------------------------------------------------------------------
// Grids and the perturbation family

class EpsGrid {
 public:
  explicit EpsGrid(std::vector<double> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    for (double v : values_)
      if (!(v > 0.0 && v <= kEpsMax))
        throw DomainError("eps grid values must lie in (0, 0.2], got " + std::to_string(v));
    const auto last = std::unique(values_.begin(), values_.end());
    if (last != values_.end()) throw DomainError("eps grid values must be distinct");
    if (values_.size() < 4) throw DomainError("eps grid needs at least 4 points");
  }

  static EpsGrid default_grid() { return EpsGrid({0.01, 0.02, 0.04, 0.06, 0.08, 0.10}); }

  // "lo:hi:n" -> n evenly spaced values from lo to hi inclusive.
  static EpsGrid parse(const std::string& text) {
    std::istringstream in(text);
    double lo = 0.0, hi = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
      throw DomainError("grid must have the form lo:hi:n, got '" + text + "'");
    if (n < 4) throw DomainError("eps grid needs at least 4 points");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return EpsGrid(std::move(v));
  }

  EpsGrid scaled(double factor) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    return EpsGrid(std::move(v));
  }

  const std::vector<double>& values() const noexcept { return values_; }
  double max() const noexcept { return values_.back(); }

 private:
  std::vector<double> values_;
};

struct EpsPair {
  PdMatrix a;
  PdMatrix b;
};

// A_e = I + e sigma_z, B_e = I + e sigma_x
inline EpsPair eps_pair(double eps) {
  if (!(std::abs(eps) < 1.0)) throw DomainError("eps_pair: |eps| must be < 1");
  const auto pb = pauli_basis();
  const HermitianMatrix id = HermitianMatrix::identity(2);
  return {PdMatrix::certify(id + eps * pb.sigma_z), PdMatrix::certify(id + eps * pb.sigma_x)};
}

// ---------------------------------------------------------------------------
// Series fits

template <class M>
struct SeriesFit {
  M c0;
  M c1;
  M c2;
  double residual_bound = 0.0;
};

namespace detail {

using Coeffs = std::vector<std::array<Complex, 3>>;

inline double vandermonde_condition(const std::vector<double>& t) {
  Matrix n(3);
  for (double x : t) {
    const double row[3] = {1.0, x, x * x};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) n(i, j) += row[i] * row[j];
  }
  const auto ev = eig(HermitianMatrix(n)).eigenvalues;
  if (!(ev.front() > 0.0)) return HUGE_VAL;
  return std::sqrt(ev.back() / ev.front());
}

// Least-squares quadratic per component in the scaled variable t = e / e_max,
// returned in e units.
inline Coeffs quadratic_least_squares(const std::vector<double>& eps,
                                      const std::vector<std::vector<Complex>>& ys) {
  const double emax = *std::max_element(eps.begin(), eps.end());
  std::vector<double> t(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) t[i] = eps[i] / emax;
  const double cond = vandermonde_condition(t);
  if (!(cond <= kVandermondeCondMax))
    throw IllConditioned("fit_series: Vandermonde condition estimate " + std::to_string(cond) +
                         " exceeds 1e8");
  Matrix n(3);
  for (double x : t) {
    const double row[3] = {1.0, x, x * x};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) n(i, j) += row[i] * row[j];
  }
  const Matrix ninv = inverse(n);
  const std::size_t comps = ys.front().size();
  Coeffs out(comps);
  for (std::size_t c = 0; c < comps; ++c) {
    Complex rhs[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < t.size(); ++i) {
      rhs[0] += ys[i][c];
      rhs[1] += t[i] * ys[i][c];
      rhs[2] += t[i] * t[i] * ys[i][c];
    }
    for (int k = 0; k < 3; ++k) {
      Complex v = 0.0;
      for (int j = 0; j < 3; ++j) v += ninv(k, j) * rhs[j];
      out[c][k] = v / std::pow(emax, k);
    }
  }
  return out;
}

struct RawFit {
  Coeffs coeffs;
  double residual_bound = 0.0;
};

// Quadratic least squares on the grid scaled by 2^-k, k = 0..L-1, followed by
// Richardson elimination of the h, h^2, ..., h^{L-1} error terms left by the
// truncated cubic and higher orders.
inline RawFit fit_components(const std::function<std::vector<Complex>(double)>& family,
                             const EpsGrid& grid) {
  const auto& base = grid.values();
  std::vector<Coeffs> level(kRichardsonLevels);
  std::vector<std::vector<Complex>> base_samples;
  std::size_t comps = 0;
  for (int k = 0; k < kRichardsonLevels; ++k) {
    const double scale = std::ldexp(1.0, -k);
    std::vector<double> eps(base.size());
    std::vector<std::vector<Complex>> ys(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      eps[i] = base[i] * scale;
      ys[i] = family(eps[i]);
      if (k == 0 && i == 0) comps = ys[i].size();
      if (ys[i].size() != comps) throw DimMismatch("fit_series: family changed size over the grid");
    }
    level[k] = quadratic_least_squares(eps, ys);
    if (k == 0) base_samples = std::move(ys);
  }
  for (int j = 1; j < kRichardsonLevels; ++j) {
    const double f = std::ldexp(1.0, j);
    for (int k = 0; k + j < kRichardsonLevels; ++k)
      for (std::size_t c = 0; c < comps; ++c)
        for (int o = 0; o < 3; ++o)
          level[k][c][o] = (f * level[k + 1][c][o] - level[k][c][o]) / (f - 1.0);
  }
  RawFit out{std::move(level[0]), 0.0};
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double e = base[i];
    for (std::size_t c = 0; c < comps; ++c) {
      const Complex model = out.coeffs[c][0] + e * out.coeffs[c][1] + e * e * out.coeffs[c][2];
      out.residual_bound = std::max(out.residual_bound, std::abs(base_samples[i][c] - model));
    }
  }
  return out;
}

inline std::vector<Complex> flatten(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

inline Matrix unflatten(const Coeffs& c, int order) {
  const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(c.size()))));
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = c[i * n + j][order];
  return m;
}

}  // namespace detail

// Entrywise complex fit for families that need not be Hermitian.
inline SeriesFit<Matrix> fit_series_general(const std::function<Matrix(double)>& family,
                                            const EpsGrid& grid) {
  const auto raw = detail::fit_components(
      [&](double e) { return detail::flatten(family(e)); }, grid);
  return {detail::unflatten(raw.coeffs, 0), detail::unflatten(raw.coeffs, 1),
          detail::unflatten(raw.coeffs, 2), raw.residual_bound};
}

inline SeriesFit<HermitianMatrix> fit_series(const std::function<HermitianMatrix(double)>& family,
                                             const EpsGrid& grid) {
  const auto g = fit_series_general([&](double e) { return family(e).matrix(); }, grid);
  return {HermitianMatrix(g.c0), HermitianMatrix(g.c1), HermitianMatrix(g.c2), g.residual_bound};
}

// Real vector-valued families (used for the rows of the preserver equation).
inline SeriesFit<std::vector<double>> fit_series_scalars(
    const std::function<std::vector<double>(double)>& family, const EpsGrid& grid) {
  const auto raw = detail::fit_components(
      [&](double e) {
        const auto v = family(e);
        return std::vector<Complex>(v.begin(), v.end());
      },
      grid);
  SeriesFit<std::vector<double>> out;
  for (const auto& c : raw.coeffs) {
    out.c0.push_back(c[0].real());
    out.c1.push_back(c[1].real());
    out.c2.push_back(c[2].real());
  }
  out.residual_bound = raw.residual_bound;
  return out;
}

// ---------------------------------------------------------------------------
// Exact identities

// ||U M - M U||_F for M = A s B.
inline double unitary_commutator(const MeanKind& kind, const PdMatrix& a, const PdMatrix& b) {
  const Matrix u = pauli_basis().u.matrix();
  const Matrix m = mean(kind, a, b).matrix();
  return commutator(u, m).frobenius_norm();
}

inline double check_unitary_invariance(const MeanKind& kind, double eps) {
  const auto [a, b] = eps_pair(eps);
  return unitary_commutator(kind, a, b);
}

inline double check_unitary_invariance(double p, double eps) {
  return check_unitary_invariance(MeanKind::kubo_ando_power(p), eps);
}

// ---------------------------------------------------------------------------
// Expansion checks

// Target second-order coefficient of A_e m_p B_e.
inline double power_mean_c2_formula(double p) { return p / 2.0 + 1.0 / (4.0 * p) - 0.75; }

// Consolidated bracket for the p-th power: p^2/2 + 1/4 - 3p/4 + p(p-1)/4.
inline double power_family_c2_consolidated(double p) {
  return p * p / 2.0 + 0.25 - 0.75 * p + p * (p - 1.0) / 4.0;
}

// Unconsolidated variant: p^2/2 + 1/p - 3p/4 + p(p-1)/4.
inline double power_family_c2_unconsolidated(double p) {
  return p * p / 2.0 + 1.0 / p - 0.75 * p + p * (p - 1.0) / 4.0;
}

inline CheckReport check_power_mean_expansion(double p, const EpsGrid& grid = EpsGrid::default_grid()) {
  const MeanKind kind = MeanKind::kubo_ando_power(p);
  const auto pb = pauli_basis();
  const Matrix id = Matrix::identity(2);
  const Matrix s = pb.sigma_z.matrix() + pb.sigma_x.matrix();

  CheckReport r{"power mean expansion (" + kind.name() + ")", {}, {}};
  const auto fit = fit_series(
      [&](double e) {
        const auto [a, b] = eps_pair(e);
        return mean(kind, a, b).hermitian();
      },
      grid);
  r.add("c0", id, fit.c0, kCoeffTolC1);
  r.add("c1", s * 0.5, fit.c1, kCoeffTolC1);
  r.add("c2", id * power_mean_c2_formula(p), fit.c2, kCoeffTolC2);
  r.add_bound("residual_bound", fit.residual_bound, HUGE_VAL);

  const auto pfit = fit_series(
      [&](double e) {
        const auto [a, b] = eps_pair(e);
        return mpow(mean(kind, a, b), p).hermitian();
      },
      grid);
  const double half_tr_c2 = 0.5 * pfit.c2.trace();
  const double composed = p * 0.5 * fit.c2.trace() + p * (p - 1.0) / 4.0;
  r.add("pow.c1", s * (0.5 * p), pfit.c1, kCoeffTolC1);
  r.add("pow.c2", power_family_c2_consolidated(p), half_tr_c2, kCoeffTolC2);
  r.add("pow.c2_composition", composed, half_tr_c2, kCoeffTolC1);

  const bool consolidated = std::abs(half_tr_c2 - power_family_c2_consolidated(p)) <= kCoeffTolC2;
  const bool unconsolidated =
      std::abs(half_tr_c2 - power_family_c2_unconsolidated(p)) <= kCoeffTolC2;
  std::ostringstream note;
  note.precision(10);
  note << "p-th power c2 (tr/2) = " << half_tr_c2 << "; consolidated variant "
       << power_family_c2_consolidated(p) << (consolidated ? " matches" : " does not match")
       << "; unconsolidated variant " << power_family_c2_unconsolidated(p)
       << (unconsolidated ? " matches" : " does not match");
  r.notes.push_back(note.str());
  return r;
}

// Inner family A_e^{-1/2} (A_e^{1/2} B_e A_e^{1/2})^{1/2} A_e^{1/2}.
inline Matrix wasserstein_inner_family(double eps) {
  const auto [a, b] = eps_pair(eps);
  const PdMatrix ah = msqrt(a);
  const PdMatrix aih = minv(ah);
  const PdMatrix r = msqrt(PdMatrix::certify(HermitianMatrix(ah.matrix() * b.matrix() * ah.matrix())));
  return aih.matrix() * r.matrix() * ah.matrix();
}

inline CheckReport check_wasserstein_expansion(const EpsGrid& grid = EpsGrid::default_grid()) {
  const MeanKind kind = MeanKind::wasserstein();
  const auto pb = pauli_basis();
  const Matrix id = Matrix::identity(2);
  const Matrix s = pb.sigma_z.matrix() + pb.sigma_x.matrix();
  CheckReport r{"wasserstein expansion", {}, {}};

  const auto fa = fit_series(
      [&](double e) {
        const auto [a, b] = eps_pair(e);
        return mean(kind, a, b).hermitian();
      },
      grid);
  r.add("mean.c1", s * 0.5, fa.c1, kCoeffTolC1);
  r.add_bound("mean.c2_norm", fa.c2.frobenius_norm(), kCoeffTolC2);

  const auto fb = fit_series(
      [&](double e) {
        const auto [a, b] = eps_pair(e);
        return msqrt(mean(kind, a, b)).hermitian();
      },
      grid);
  r.add("sqrt.c1", s * 0.25, fb.c1, kCoeffTolC1);
  r.add("sqrt.c2", id * (-1.0 / 16.0), fb.c2, kCoeffTolC2);

  const auto fc = fit_series_general(wasserstein_inner_family, grid);
  r.add("inner.c1", s * 0.5, fc.c1, kCoeffTolC1);
  r.add("inner.c2", pb.sigma_x.matrix() * pb.sigma_z.matrix() * 0.5, fc.c2, kCoeffTolC2);

  r.add_bound("unitary_commutator(eps=0.4)", check_unitary_invariance(kind, 0.4), 1e-11);
  return r;
}

}  // namespace meanlab
