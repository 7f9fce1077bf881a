#pragma once

// Binary means on the positive definite cone.
//
// Kubo-Ando means are built from their representing function f through
//   A s B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2};
// the conventional power mean, the spectral geometric mean and the
// Wasserstein mean are the non-Kubo-Ando members of the family.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "meanlab/matrix.hpp"
#include "meanlab/random.hpp"

namespace meanlab {

inline constexpr double kPowerMin = 1e-6;

// Normalized (f(1) = 1) positive function on (0, inf). Operator monotonicity
// is the caller's responsibility.
class RepresentingFunction {
 public:
  RepresentingFunction(std::function<double(double)> f, std::string label)
      : f_(std::move(f)), label_(std::move(label)) {
    const double at_one = f_(1.0);
    if (!(std::abs(at_one - 1.0) <= 1e-12))
      throw DomainError("representing function must satisfy f(1) = 1, got " +
                        std::to_string(at_one));
  }

  double operator()(double t) const { return f_(t); }
  const std::string& label() const noexcept { return label_; }

 private:
  std::function<double(double)> f_;
  std::string label_;
};

enum class MeanTag {
  Arithmetic,
  Harmonic,
  Geometric,
  KuboAndoPower,
  ConventionalPower,
  SpectralGeometric,
  Wasserstein,
  FromFunction,
};

class MeanKind {
 public:
  static MeanKind arithmetic() { return MeanKind(MeanTag::Arithmetic); }
  static MeanKind harmonic() { return MeanKind(MeanTag::Harmonic); }
  static MeanKind geometric() { return MeanKind(MeanTag::Geometric); }
  static MeanKind spectral_geometric() { return MeanKind(MeanTag::SpectralGeometric); }
  static MeanKind wasserstein() { return MeanKind(MeanTag::Wasserstein); }
  static MeanKind kubo_ando_power(double p) { return MeanKind(MeanTag::KuboAndoPower, p); }
  static MeanKind conventional_power(double p) { return MeanKind(MeanTag::ConventionalPower, p); }
  static MeanKind from_function(RepresentingFunction f) {
    MeanKind k(MeanTag::FromFunction);
    k.f_ = std::make_shared<RepresentingFunction>(std::move(f));
    return k;
  }

  // CLI names: arithmetic, harmonic, geometric, kubo-ando, conventional,
  // spectral-geometric, wasserstein.
  static MeanKind parse(const std::string& name, std::optional<double> p = std::nullopt) {
    auto need_p = [&]() {
      if (!p) throw DomainError("mean kind '" + name + "' requires a power parameter");
      return *p;
    };
    if (name == "arithmetic") return arithmetic();
    if (name == "harmonic") return harmonic();
    if (name == "geometric") return geometric();
    if (name == "spectral-geometric") return spectral_geometric();
    if (name == "wasserstein") return wasserstein();
    if (name == "kubo-ando" || name == "power") return kubo_ando_power(need_p());
    if (name == "conventional") return conventional_power(need_p());
    throw DomainError("unknown mean kind '" + name + "'");
  }

  MeanTag tag() const noexcept { return tag_; }
  double p() const noexcept { return p_; }
  const RepresentingFunction* function() const noexcept { return f_.get(); }

  bool is_kubo_ando() const noexcept {
    return tag_ != MeanTag::ConventionalPower && tag_ != MeanTag::SpectralGeometric &&
           tag_ != MeanTag::Wasserstein;
  }

  std::string name() const {
    switch (tag_) {
      case MeanTag::Arithmetic: return "arithmetic";
      case MeanTag::Harmonic: return "harmonic";
      case MeanTag::Geometric: return "geometric";
      case MeanTag::KuboAndoPower: return "kubo-ando(p=" + format_p() + ")";
      case MeanTag::ConventionalPower: return "conventional(p=" + format_p() + ")";
      case MeanTag::SpectralGeometric: return "spectral-geometric";
      case MeanTag::Wasserstein: return "wasserstein";
      case MeanTag::FromFunction: return "from-function(" + f_->label() + ")";
    }
    return "unknown";
  }

  // Scalar representing function t -> f(t) of a Kubo-Ando kind.
  double representing_value(double t) const {
    switch (tag_) {
      case MeanTag::Arithmetic: return 0.5 * (1.0 + t);
      case MeanTag::Harmonic: return 2.0 * t / (1.0 + t);
      case MeanTag::Geometric: return std::sqrt(t);
      case MeanTag::KuboAndoPower: return std::pow(0.5 * (1.0 + std::pow(t, p_)), 1.0 / p_);
      case MeanTag::FromFunction: return (*f_)(t);
      default: throw NotKuboAndo(name() + " is not a Kubo-Ando mean");
    }
  }

 private:
  explicit MeanKind(MeanTag tag, double p = 0.0) : tag_(tag), p_(p) {
    if (tag == MeanTag::KuboAndoPower || tag == MeanTag::ConventionalPower) {
      if (!std::isfinite(p) || std::abs(p) < kPowerMin || std::abs(p) > 1.0)
        throw DomainError("power mean parameter must satisfy 1e-6 <= |p| <= 1, got " +
                          std::to_string(p));
    }
  }

  std::string format_p() const {
    std::string s = std::to_string(p_);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  MeanTag tag_;
  double p_ = 0.0;
  std::shared_ptr<const RepresentingFunction> f_;
};

namespace detail {

inline void require_same_dim(const PdMatrix& a, const PdMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch("mean: operands have different dimensions");
}

// Means of PD operands are PD; failing that is a numerical bug, not bad input.
inline PdMatrix certify_result(const Matrix& m, const char* what) {
  try {
    return PdMatrix::certify(HermitianMatrix(m));
  } catch (const Error& e) {
    throw InternalError(std::string(what) + ": result failed PD certification: " + e.what());
  }
}

// A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}
template <class F>
Matrix kubo_ando_sandwich(const PdMatrix& a, const PdMatrix& b, F&& f) {
  const PdMatrix ah = msqrt(a);
  const PdMatrix aih = minv(ah);
  const HermitianMatrix inner(aih.matrix() * b.matrix() * aih.matrix());
  const HermitianMatrix fx = func_calc(inner, std::forward<F>(f), ScalarDomain::positive());
  return ah.matrix() * fx.matrix() * ah.matrix();
}

inline double gp_value(double p, double x) {
  return std::pow(0.5 * (1.0 + std::pow(x, p)), 1.0 / p);
}

}  // namespace detail

inline PdMatrix geometric_mean(const PdMatrix& a, const PdMatrix& b) {
  detail::require_same_dim(a, b);
  return detail::certify_result(
      detail::kubo_ando_sandwich(a, b, [](double t) { return std::sqrt(t); }), "geometric mean");
}

inline PdMatrix kubo_ando_from_function(const RepresentingFunction& f, const PdMatrix& a,
                                        const PdMatrix& b) {
  detail::require_same_dim(a, b);
  return detail::certify_result(detail::kubo_ando_sandwich(a, b, f), "kubo-ando mean");
}

inline PdMatrix mean(const MeanKind& kind, const PdMatrix& a, const PdMatrix& b) {
  detail::require_same_dim(a, b);
  switch (kind.tag()) {
    case MeanTag::Arithmetic:
      return detail::certify_result((a.matrix() + b.matrix()) * 0.5, "arithmetic mean");
    case MeanTag::Harmonic: {
      const PdMatrix s = PdMatrix::certify(HermitianMatrix(minv(a).matrix() + minv(b).matrix()));
      return detail::certify_result(minv(s).matrix() * 2.0, "harmonic mean");
    }
    case MeanTag::Geometric:
      return geometric_mean(a, b);
    case MeanTag::KuboAndoPower: {
      const double p = kind.p();
      if (p == 1.0) return mean(MeanKind::arithmetic(), a, b);
      return detail::certify_result(
          detail::kubo_ando_sandwich(a, b, [p](double t) { return detail::gp_value(p, t); }),
          "kubo-ando power mean");
    }
    case MeanTag::ConventionalPower: {
      const double p = kind.p();
      const PdMatrix avg =
          PdMatrix::certify(HermitianMatrix((mpow(a, p).matrix() + mpow(b, p).matrix()) * 0.5));
      return detail::certify_result(mpow(avg, 1.0 / p).matrix(), "conventional power mean");
    }
    case MeanTag::SpectralGeometric: {
      const PdMatrix g = geometric_mean(minv(a), b);
      const PdMatrix gh = msqrt(g);
      return detail::certify_result(gh.matrix() * a.matrix() * gh.matrix(),
                                    "spectral geometric mean");
    }
    case MeanTag::Wasserstein: {
      const Matrix g = geometric_mean(minv(a), b).matrix();
      const Matrix& am = a.matrix();
      return detail::certify_result((am + b.matrix() + am * g + g * am) * 0.25,
                                    "wasserstein mean");
    }
    case MeanTag::FromFunction:
      return kubo_ando_from_function(*kind.function(), a, b);
  }
  throw InternalError("mean: unhandled kind");
}

// (A + B + A^{-1/2}(A^{1/2}BA^{1/2})^{1/2}A^{1/2} + A^{1/2}(A^{1/2}BA^{1/2})^{1/2}A^{-1/2}) / 4
inline PdMatrix wasserstein_alt(const PdMatrix& a, const PdMatrix& b) {
  detail::require_same_dim(a, b);
  const PdMatrix ah = msqrt(a);
  const PdMatrix aih = minv(ah);
  const PdMatrix r = msqrt(PdMatrix::certify(HermitianMatrix(ah.matrix() * b.matrix() * ah.matrix())));
  const Matrix left = aih.matrix() * r.matrix() * ah.matrix();
  const Matrix right = ah.matrix() * r.matrix() * aih.matrix();
  return detail::certify_result((a.matrix() + b.matrix() + left + right) * 0.25,
                                "wasserstein mean (alternative form)");
}

// f(t) recovered as the (1,1) entry of I s tI.
inline double representing_function_of(const MeanKind& kind, double t) {
  if (!kind.is_kubo_ando()) throw NotKuboAndo(kind.name() + " is not a Kubo-Ando mean");
  if (!(t > 0.0)) throw DomainError("representing_function_of: t must be positive");
  const PdMatrix id = PdMatrix::identity(1);
  const PdMatrix ti = PdMatrix::certify(HermitianMatrix(Matrix::identity(1) * t));
  return mean(kind, id, ti)(0, 0).real();
}

// Ando's variational characterization: X <= A # B iff [[A, X], [X, B]] >= 0.
inline bool ando_variational_certificate(const PdMatrix& a, const PdMatrix& b,
                                         const HermitianMatrix& x) {
  const std::size_t n = a.dim();
  if (b.dim() != n || x.dim() != n) throw DimMismatch("ando certificate: dimension mismatch");
  Matrix block(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      block(i, j) = a(i, j);
      block(i, j + n) = x(i, j);
      block(i + n, j) = x(i, j);
      block(i + n, j + n) = b(i, j);
    }
  const HermitianMatrix h(block);
  return min_eigenvalue(h) >= -1e-10 * std::max(1.0, h.frobenius_norm());
}

// ---------------------------------------------------------------------------
// Kubo-Ando axiom checks

struct AxiomResult {
  std::string axiom;
  int samples = 0;
  int failures = 0;
  double worst_violation = 0.0;
};

struct AxiomReport {
  std::string kind;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<AxiomResult> axioms;

  bool all_passed() const {
    for (const auto& a : axioms)
      if (a.failures != 0) return false;
    return true;
  }
};

struct AxiomTolerances {
  double normalization = 1e-11;
  double loewner = 1e-10;       // relative to the larger side
  double transformer = 1e-10;   // relative equality gap
  double continuity = 1e-4;     // final distance of the decreasing sequence
};

namespace detail {

inline void record(AxiomResult& r, double violation, double tol) {
  ++r.samples;
  if (violation > tol) ++r.failures;
  r.worst_violation = std::max(r.worst_violation, violation);
}

inline double loewner_violation(const HermitianMatrix& lower, const HermitianMatrix& upper) {
  const double lmin = min_eigenvalue(upper - lower);
  const double scale = std::max(1.0, upper.frobenius_norm());
  return std::max(0.0, -lmin) / scale;
}

}  // namespace detail

// Samples `samples` random PD pairs (per-sample seeds) and checks:
//   normalization  I s I = I and A s A = A
//   monotonicity   A <= B, C <= D  =>  A s C <= B s D, with B = A + R*R + mu I
//   transformer    C (A s B) C <= (CAC) s (CBC); equality for invertible C
//                  (alternating Hermitian indefinite and positive C)
//   continuity     A + I/k, B + I/k decreasing in k gives a Loewner-decreasing
//                  sequence of means converging to A s B
inline AxiomReport check_kubo_ando_axioms(const MeanKind& kind, int samples, std::uint64_t seed,
                                          std::size_t dim = 2, AxiomTolerances tol = {}) {
  if (!kind.is_kubo_ando()) throw NotKuboAndo(kind.name() + " is not a Kubo-Ando mean");
  AxiomReport report{kind.name(), dim, seed, {}};
  AxiomResult norm{"normalization"}, mono{"monotonicity"}, trans_ineq{"transformer_inequality"},
      trans_eq{"transformer_equality"}, cont{"continuity"};
  const PdMatrix id = PdMatrix::identity(dim);
  const Matrix eye = Matrix::identity(dim);

  for (int s = 0; s < samples; ++s) {
    Rng rng = sample_rng(seed, static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PdMatrix a = random_pd(dim, rng);
    const PdMatrix c = random_pd(dim, rng);

    // (1)
    {
      const double v1 = (mean(kind, id, id).matrix() - eye).frobenius_norm();
      const PdMatrix aa = mean(kind, a, a);
      const double v2 = (aa.matrix() - a.matrix()).frobenius_norm() / std::max(1.0, a.frobenius_norm());
      detail::record(norm, std::max(v1, v2), tol.normalization);
    }
    // (2)
    {
      const Matrix r1 = random_gaussian_matrix(dim, rng);
      const Matrix r2 = random_gaussian_matrix(dim, rng);
      const PdMatrix b = PdMatrix::certify(
          HermitianMatrix(a.matrix() + r1.adjoint() * r1 + eye * unit(rng)));
      const PdMatrix d = PdMatrix::certify(
          HermitianMatrix(c.matrix() + r2.adjoint() * r2 + eye * unit(rng)));
      detail::record(mono, detail::loewner_violation(mean(kind, a, c), mean(kind, b, d)),
                     tol.loewner);
    }
    // (3)
    {
      const HermitianMatrix cm =
          (s % 2 == 0) ? random_hermitian_invertible(dim, rng) : random_pd(dim, rng).hermitian();
      const HermitianMatrix lhs = congruence(cm, mean(kind, a, c));
      const PdMatrix ca = PdMatrix::certify(congruence(cm, a));
      const PdMatrix cc = PdMatrix::certify(congruence(cm, c));
      const HermitianMatrix rhs = mean(kind, ca, cc);
      detail::record(trans_ineq, detail::loewner_violation(lhs, rhs), tol.loewner);
      const double gap = (lhs.matrix() - rhs.matrix()).frobenius_norm() /
                         std::max(1.0, rhs.frobenius_norm());
      detail::record(trans_eq, gap, tol.transformer);
    }
    // (4)
    {
      const PdMatrix limit = mean(kind, a, c);
      double violation = 0.0;
      std::optional<PdMatrix> prev;
      double prev_dist = HUGE_VAL;
      for (int j = 0; j <= 20; ++j) {
        const double shift = std::ldexp(1.0, -j);
        const PdMatrix ak = PdMatrix::certify(HermitianMatrix(a.matrix() + eye * shift));
        const PdMatrix ck = PdMatrix::certify(HermitianMatrix(c.matrix() + eye * shift));
        PdMatrix mk = mean(kind, ak, ck);
        if (prev) violation = std::max(violation, detail::loewner_violation(mk, *prev));
        const double dist = (mk.matrix() - limit.matrix()).frobenius_norm();
        if (dist > prev_dist * (1.0 + 1e-9) + 1e-13) violation = std::max(violation, dist - prev_dist);
        prev_dist = dist;
        prev = std::move(mk);
      }
      const double final_rel = prev_dist / std::max(1.0, limit.frobenius_norm());
      if (final_rel > tol.continuity) violation = std::max(violation, final_rel);
      detail::record(cont, violation, std::max(tol.loewner, 1e-10));
    }
  }
  report.axioms = {norm, mono, trans_ineq, trans_eq, cont};
  return report;
}

}  // namespace meanlab
