#pragma once

// Mean-preserving scalar functionals on M_2 and the linear system that the
// preserver equation imposes on an affine-on-MASA candidate.

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "meanlab/checks.hpp"
#include "meanlab/expansion.hpp"
#include "meanlab/matrix.hpp"
#include "meanlab/means.hpp"

namespace meanlab {

inline constexpr double kMasaKeyTol = 1e-9;
inline constexpr double kNullSpaceTol = 1e-6;

// ---------------------------------------------------------------------------
// Scalar functionals

class ScalarFunctional {
 public:
  using Evaluator = std::function<double(const PdMatrix&)>;

  ScalarFunctional(Evaluator f, std::string label) : f_(std::move(f)), label_(std::move(label)) {}

  double operator()(const PdMatrix& a) const { return f_(a); }
  const std::string& label() const noexcept { return label_; }

  static ScalarFunctional constant(double c) {
    if (!(c > 0.0)) throw DomainError("constant functional must be positive");
    return {[c](const PdMatrix&) { return c; }, "constant(" + std::to_string(c) + ")"};
  }

  // (tr(A^q)/n)^{1/q}
  static ScalarFunctional trace_power(double q) {
    if (!std::isfinite(q) || q == 0.0) throw DomainError("trace_power: q must be nonzero");
    return {[q](const PdMatrix& a) {
              return std::pow(mpow(a, q).trace() / static_cast<double>(a.dim()), 1.0 / q);
            },
            "trace-power(q=" + std::to_string(q) + ")"};
  }

  // tr(W A) with W positive semidefinite, rescaled to tr W = 1.
  static ScalarFunctional positive_linear(const HermitianMatrix& w) {
    if (min_eigenvalue(w) < -1e-12 * std::max(1.0, w.frobenius_norm()))
      throw DomainError("positive_linear: weight must be positive semidefinite");
    const double tr = w.trace();
    if (!(tr > 0.0)) throw DomainError("positive_linear: weight must have positive trace");
    const Matrix wn = w.matrix() / tr;
    return {[wn](const PdMatrix& a) {
              if (a.dim() != wn.dim()) throw DimMismatch("positive_linear: dimension mismatch");
              return (wn * a.matrix()).trace().real();
            },
            "positive-linear"};
  }

  static ScalarFunctional lambda_max() {
    return {[](const PdMatrix& a) { return a.max_eigenvalue(); }, "lambda-max"};
  }

  ScalarFunctional scaled(double lambda) const {
    if (!(lambda > 0.0)) throw DomainError("scaled: factor must be positive");
    return {[f = f_, lambda](const PdMatrix& a) { return lambda * f(a); },
            std::to_string(lambda) + "*" + label_};
  }

 private:
  Evaluator f_;
  std::string label_;
};

// phi(X) = f(X^{1/p})^p. With p = 1/2 this is the transform (.)^{1/2} o f o (.)^2
// used for the Wasserstein mean.
inline ScalarFunctional phi_of(const ScalarFunctional& f, double p) {
  if (!std::isfinite(p) || std::abs(p) < kPowerMin || std::abs(p) > 1.0)
    throw DomainError("phi_of: p must satisfy 1e-6 <= |p| <= 1");
  return {[f, p](const PdMatrix& x) { return std::pow(f(mpow(x, 1.0 / p)), p); },
          "phi[" + f.label() + ", p=" + std::to_string(p) + "]"};
}

// Inverse transform f(A) = phi(A^p)^{1/p}.
inline ScalarFunctional from_phi(const ScalarFunctional& phi, double p) {
  if (!std::isfinite(p) || std::abs(p) < kPowerMin || std::abs(p) > 1.0)
    throw DomainError("from_phi: p must satisfy 1e-6 <= |p| <= 1");
  return {[phi, p](const PdMatrix& a) { return std::pow(phi(mpow(a, p)), 1.0 / p); },
          "unphi[" + phi.label() + ", p=" + std::to_string(p) + "]"};
}

// ---------------------------------------------------------------------------
// Affine model on maximal Abelian subalgebras of M_2

struct MasaCoordinates {
  double t = 0.0;  // tr(X)/2
  double s = 0.0;  // tr(G X)/2
};

// X = tI + sG read off by trace pairing against a fixed G.
inline MasaCoordinates masa_coordinates(const HermitianMatrix& g, const Matrix& x) {
  if (g.dim() != 2 || x.dim() != 2) throw DimMismatch("masa: only M_2 is supported");
  return {0.5 * x.trace().real(), 0.5 * (g.matrix() * x).trace().real()};
}

// Traceless self-adjoint unitary, sign fixed so that the first nonzero entry
// (row-major, real part first) is positive.
inline HermitianMatrix canonical_direction(const HermitianMatrix& g) {
  if (g.dim() != 2) throw DimMismatch("masa: only M_2 is supported");
  const Matrix& m = g.matrix();
  if (std::abs(m.trace()) > kMasaKeyTol || max_abs_diff(m * m, Matrix::identity(2)) > kMasaKeyTol)
    throw DomainError("masa direction must be a traceless self-adjoint unitary");
  for (const Complex& v : m.data()) {
    const double lead = std::abs(v.real()) > kMasaKeyTol ? v.real() : v.imag();
    if (std::abs(lead) > kMasaKeyTol) return lead > 0.0 ? g : -1.0 * g;
  }
  throw InternalError("canonical_direction: zero matrix");
}

class MasaFunctional {
 public:
  explicit MasaFunctional(double c_identity) : c_i_(c_identity) {
    if (!(c_identity >= 0.0) || !std::isfinite(c_identity))
      throw DomainError("masa functional: c_I must be a finite nonnegative number");
  }

  // Registers c_G (also serving -G). |c_G| <= c_I is enforced.
  MasaFunctional& set(const HermitianMatrix& g, double c_g) {
    if (std::abs(c_g) > c_i_ + 1e-15)
      throw DomainError("masa functional: |c_G| must not exceed c_I");
    const HermitianMatrix key = canonical_direction(g);
    for (auto& [k, v] : coeffs_)
      if (max_abs_diff(k, key) <= kMasaKeyTol) {
        v = c_g;
        return *this;
      }
    coeffs_.emplace_back(key, c_g);
    return *this;
  }

  double c_identity() const noexcept { return c_i_; }

  // Unregistered directions default to 0.
  double coefficient(const HermitianMatrix& g) const {
    const HermitianMatrix key = canonical_direction(g);
    for (const auto& [k, v] : coeffs_)
      if (max_abs_diff(k, key) <= kMasaKeyTol) return v;
    return 0.0;
  }

  std::size_t registered() const noexcept { return coeffs_.size(); }

  double affine(double t, double c_g, double s) const { return c_i_ * t + c_g * s + (1.0 - c_i_); }

 private:
  double c_i_;
  std::vector<std::pair<HermitianMatrix, double>> coeffs_;
};

// c_I t + c_G s + (1 - c_I) for X = tI + sG, s >= 0, G = (X - tI)/s.
inline double masa_eval(const MasaFunctional& m, const HermitianMatrix& x) {
  if (x.dim() != 2) throw DimMismatch("masa_eval: only M_2 is supported");
  const double t = 0.5 * x.trace();
  const Matrix d = x.matrix() - Matrix::identity(2) * t;
  const double s = d.frobenius_norm() / std::sqrt(2.0);
  if (!(s < t)) throw NotInCone("masa_eval: X = tI + sG needs |s| < t");
  double value = m.affine(t, 0.0, 0.0);
  if (s > 1e-15 * std::max(1.0, t)) value = m.affine(t, m.coefficient(HermitianMatrix(d / s)), s);
  if (!(value > 0.0)) throw DomainError("masa_eval: model value is not positive");
  return value;
}

// Evaluation inside the algebra of a fixed G with signed coordinates.
inline double masa_eval_in(const MasaFunctional& m, const HermitianMatrix& g, const HermitianMatrix& x) {
  const auto [t, s] = masa_coordinates(g, x);
  const Matrix rebuilt = Matrix::identity(2) * t + g.matrix() * s;
  if (max_abs_diff(rebuilt, x) > 1e-9 * std::max(1.0, x.frobenius_norm()))
    throw DomainError("masa_eval_in: X is not in the algebra generated by G");
  if (!(std::abs(s) < t)) throw NotInCone("masa_eval_in: X = tI + sG needs |s| < t");
  return m.affine(t, m.coefficient(g), s);
}

inline ScalarFunctional as_functional(const MasaFunctional& m) {
  return {[m](const PdMatrix& x) { return masa_eval(m, x.hermitian()); }, "masa-affine"};
}

// ---------------------------------------------------------------------------
// Preserver residuals

inline double scalar_mean(const MeanKind& kind, double x, double y) {
  switch (kind.tag()) {
    case MeanTag::Arithmetic: return 0.5 * (x + y);
    case MeanTag::KuboAndoPower: {
      const double p = kind.p();
      return std::pow(0.5 * (std::pow(x, p) + std::pow(y, p)), 1.0 / p);
    }
    case MeanTag::Wasserstein: {
      const double r = 0.5 * (std::sqrt(x) + std::sqrt(y));
      return r * r;
    }
    default:
      throw DomainError("preserver: unsupported mean " + kind.name());
  }
}

// |f(A s B) - f(A) s f(B)|
inline double preserver_residual(const ScalarFunctional& f, const MeanKind& kind, const PdMatrix& a,
                                 const PdMatrix& b) {
  const double rhs = scalar_mean(kind, f(a), f(b));
  return std::abs(f(mean(kind, a, b)) - rhs);
}

// ---------------------------------------------------------------------------
// Coefficient solve

inline constexpr std::array<const char*, 4> kUnknowns = {"c_I", "c_sigma_z", "c_sigma_x", "c_U"};
using Row = std::array<double, 4>;

struct CoefficientSolveReport {
  std::string kind;
  double exponent = 1.0;          // p for m_p, 1/2 for the Wasserstein mean
  Row r0{}, r1{}, r2{};            // orders 0, 1, 2 of the sampled equation
  double fit_residual = 0.0;
  std::vector<double> singular_values;  // of the stacked first/second-order system
  std::vector<Row> null_space;           // orthonormal basis
  double c_identity_extent = 0.0;  // |projection of e_I onto the null space|
  bool c_identity_forced = false;
  double first_order_error = 0.0;  // vs (0, -1/sqrt2, -1/sqrt2, 1) after scaling c_U to 1
  double second_order_c_identity = 0.0;
  double second_order_expected = 0.0;
  double second_order_row_max = 0.0;
  CheckReport checks;
};

namespace detail {

struct PreserverSetup {
  MeanKind kind;
  double exponent;
  double second_order_expected;
};

inline PreserverSetup preserver_setup(const MeanKind& kind) {
  switch (kind.tag()) {
    case MeanTag::Arithmetic: return {kind, 1.0, 0.0};
    case MeanTag::KuboAndoPower: {
      const double p = kind.p();
      return {kind, p, (p - 1.0) * (p - 1.0) / 4.0};
    }
    case MeanTag::Wasserstein: return {kind, 0.5, 1.0 / 16.0};
    default:
      throw DomainError("solve_coefficients: unsupported mean " + kind.name());
  }
}

// Row of phi(L) = (phi(a) + phi(b))/2 with L = (A s B)^q, a = A^q, b = B^q, where
// phi is affine on the U-, sigma_z- and sigma_x-algebras respectively.
inline Row preserver_row(const PreserverSetup& setup, double eps) {
  const auto pb = pauli_basis();
  const auto [a, b] = eps_pair(eps);
  const double q = setup.exponent;
  const Matrix l = mpow(mean(setup.kind, a, b), q).matrix();
  const auto lu = masa_coordinates(pb.u, l);
  const auto az = masa_coordinates(pb.sigma_z, mpow(a, q).matrix());
  const auto bx = masa_coordinates(pb.sigma_x, mpow(b, q).matrix());
  return {lu.t - 0.5 * (az.t + bx.t), -0.5 * az.s, -0.5 * bx.s, lu.s};
}

}  // namespace detail

inline CoefficientSolveReport solve_coefficients(const MeanKind& kind,
                                                 const EpsGrid& grid = EpsGrid::default_grid()) {
  const auto setup = detail::preserver_setup(kind);
  CoefficientSolveReport rep;
  rep.kind = kind.name();
  rep.exponent = setup.exponent;
  rep.second_order_expected = setup.second_order_expected;
  rep.checks.subject = "coefficient solve (" + rep.kind + ")";

  const auto fit = fit_series_scalars(
      [&](double e) {
        const Row r = detail::preserver_row(setup, e);
        return std::vector<double>(r.begin(), r.end());
      },
      grid);
  for (std::size_t k = 0; k < 4; ++k) {
    rep.r0[k] = fit.c0[k];
    rep.r1[k] = fit.c1[k];
    rep.r2[k] = fit.c2[k];
  }
  rep.fit_residual = fit.residual_bound;

  // Null space of K = [r1; r2] from the eigen-decomposition of K^T K.
  Matrix ktk(4);
  for (const Row* r : {&rep.r1, &rep.r2})
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ktk(i, j) += (*r)[i] * (*r)[j];
  const Spectrum sp = eig(HermitianMatrix(ktk));
  for (auto it = sp.eigenvalues.rbegin(); it != sp.eigenvalues.rend(); ++it)
    rep.singular_values.push_back(std::sqrt(std::max(0.0, *it)));
  const double smax = rep.singular_values.front();
  const double cut = kNullSpaceTol * std::max(1.0, smax);
  double extent2 = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (std::sqrt(std::max(0.0, sp.eigenvalues[c])) > cut) continue;
    Row v{};
    for (int i = 0; i < 4; ++i) v[i] = sp.eigenvectors(i, c).real();
    extent2 += v[0] * v[0];
    rep.null_space.push_back(v);
  }
  rep.c_identity_extent = std::sqrt(extent2);
  rep.c_identity_forced = rep.c_identity_extent <= kNullSpaceTol;

  if (std::abs(rep.r1[3]) <= kNullSpaceTol)
    throw IllConditioned("solve_coefficients: first-order row has no c_U component");
  const Row expected1 = {0.0, -1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 1.0};
  for (int i = 0; i < 4; ++i)
    rep.first_order_error =
        std::max(rep.first_order_error, std::abs(rep.r1[i] / rep.r1[3] - expected1[i]));
  rep.second_order_c_identity = rep.r2[0];
  for (double v : rep.r2) rep.second_order_row_max = std::max(rep.second_order_row_max, std::abs(v));

  auto& ck = rep.checks;
  ck.add_bound("first_order_constraint", rep.first_order_error, kNullSpaceTol);
  const bool linear = setup.exponent == 1.0;
  if (linear) {
    ck.add_bound("second_order_row_zero", rep.second_order_row_max, kNullSpaceTol);
    ck.add_floor("c_I_unconstrained", rep.c_identity_extent, 1.0 - kNullSpaceTol);
  } else {
    ck.add("second_order_c_I", rep.second_order_expected, rep.second_order_c_identity, kCoeffTolC2);
    ck.add_bound("c_I_forced", rep.c_identity_extent, kNullSpaceTol);
  }
  std::ostringstream note;
  note << "null space dimension " << rep.null_space.size() << ", c_I extent "
       << rep.c_identity_extent;
  ck.notes.push_back(note.str());
  return rep;
}

}  // namespace meanlab
