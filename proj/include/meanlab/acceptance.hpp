#pragma once

// The eleven acceptance criteria as runnable checks. Each returns a pass flag
// plus a one-line detail naming the worst observed quantity. Tolerances are
// multiplied by tol_scale; lower-bound thresholds are not.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meanlab/centrality.hpp"
#include "meanlab/checks.hpp"
#include "meanlab/expansion.hpp"
#include "meanlab/geometry.hpp"
#include "meanlab/means.hpp"
#include "meanlab/preserver.hpp"
#include "meanlab/random.hpp"

namespace meanlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

inline constexpr double kSixPowers[] = {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9};
inline constexpr int kCriterionCount = 11;

namespace detail {

// Collects named worst-case quantities against their limits.
class Tally {
 public:
  explicit Tally(double scale) : scale_(scale) {}

  // observed <= tol * scale
  void at_most(const std::string& name, double observed, double tol) {
    item(name, observed, tol * scale_, observed <= tol * scale_, "<=");
  }
  // observed >= floor (unscaled)
  void at_least(const std::string& name, double observed, double floor) {
    item(name, observed, floor, observed >= floor, ">=");
  }
  void flag(const std::string& name, bool ok) {
    ++count_;
    pass_ = pass_ && ok;
    if (!ok) failed_.push_back(name);
  }
  // lo <= observed <= hi (unscaled)
  void within(const std::string& name, double observed, double lo, double hi) {
    ++count_;
    const bool ok = observed >= lo && observed <= hi;
    pass_ = pass_ && ok;
    if (!ok) {
      std::ostringstream os;
      os.precision(3);
      os << name << " = " << observed << " (need [" << lo << ", " << hi << "])";
      failed_.push_back(os.str());
    }
  }

  bool pass() const { return pass_; }

  std::string detail() const {
    std::ostringstream os;
    os.precision(3);
    if (failed_.empty()) {
      os << "all " << count_ << " checks within limits";
    } else {
      os << failed_.size() << "/" << count_ << " failed: ";
      for (std::size_t i = 0; i < failed_.size() && i < 4; ++i) os << (i ? "; " : "") << failed_[i];
      if (failed_.size() > 4) os << "; ...";
    }
    return os.str();
  }

 private:
  void item(const std::string& name, double observed, double limit, bool ok, const char* rel) {
    ++count_;
    pass_ = pass_ && ok;
    if (!ok) {
      std::ostringstream os;
      os.precision(3);
      os << name << " = " << observed << " (need " << rel << " " << limit << ")";
      failed_.push_back(os.str());
    }
  }

  double scale_;
  bool pass_ = true;
  int count_ = 0;
  std::vector<std::string> failed_;
};

inline std::string named(const char* key, double v) {
  std::ostringstream os;
  os << key << "=" << v;
  return os.str();
}

inline std::string pname(double p) { return named("p", p); }

inline CriterionResult finish(int id, std::string title, const Tally& t) {
  return {id, std::move(title), t.pass(), t.detail()};
}

}  // namespace detail

inline CriterionResult criterion_unitary_invariance(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  for (double p : kSixPowers)
    for (double eps : {0.1, 0.3, 0.5})
      t.at_most("[U, m_p] " + detail::pname(p) + " " + detail::named("eps", eps),
                check_unitary_invariance(p, eps), 1e-11);
  for (double eps : {0.1, 0.4})
    t.at_most("[U, s_W] " + detail::named("eps", eps),
              check_unitary_invariance(MeanKind::wasserstein(), eps), 1e-11);
  return detail::finish(1, "unitary invariance of m_p and the Wasserstein mean", t);
}

inline CriterionResult criterion_power_mean_expansion(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  for (double p : kSixPowers) {
    const CheckReport r = check_power_mean_expansion(p);
    t.at_most("c1 " + detail::pname(p), r.at("c1").deviation, kCoeffTolC1);
    t.at_most("c2 " + detail::pname(p), r.at("c2").deviation, kCoeffTolC2);
  }
  return detail::finish(2, "power mean expansion coefficients c1, c2", t);
}

inline CriterionResult criterion_wasserstein_expansion(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  const CheckReport r = check_wasserstein_expansion();
  for (const char* name : {"mean.c2_norm", "sqrt.c2", "inner.c2"})
    t.at_most(name, r.at(name).deviation, kCoeffTolC2);
  return detail::finish(3, "Wasserstein mean expansions", t);
}

inline CriterionResult criterion_gp_derivatives(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  const double h1 = 1e-5, h2 = 1e-4;
  for (double p : kSixPowers) {
    const double d1 = gp_d1(p, 1.0);
    t.at_most("g'(1) - 1/2 " + detail::pname(p), std::abs(d1 - 0.5), 0.0);
    const double cd1 = (gp_eval(p, 1 + h1) - gp_eval(p, 1 - h1)) / (2 * h1);
    t.at_most("g'(1) vs central difference " + detail::pname(p), std::abs(d1 - cd1), 1e-8);
    const double cd2 = (gp_eval(p, 1 + h2) - 2 * gp_eval(p, 1.0) + gp_eval(p, 1 - h2)) / (h2 * h2);
    t.at_most("closed-form g''(1) anchor vs second difference " + detail::pname(p),
              std::abs(gp_d2_closed_form_anchor(p) - cd2), 1e-6);
  }
  return detail::finish(4, "g_p derivative anchors at 1", t);
}

inline CriterionResult criterion_forced_constancy(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  std::vector<MeanKind> kinds;
  for (double p : kSixPowers) kinds.push_back(MeanKind::kubo_ando_power(p));
  kinds.push_back(MeanKind::wasserstein());
  kinds.push_back(MeanKind::kubo_ando_power(1.0));
  for (const auto& k : kinds) {
    const auto r = solve_coefficients(k);
    if (k.tag() == MeanTag::KuboAndoPower && k.p() == 1.0) {
      t.at_most("second-order row " + k.name(), r.second_order_row_max, kNullSpaceTol);
      t.at_least("c_I extent " + k.name(), r.c_identity_extent, 1.0 - kNullSpaceTol);
    } else {
      // c_I is forced to zero iff no null vector has a c_I component
      t.at_most("c_I extent over null space " + k.name(), r.c_identity_extent, kNullSpaceTol);
    }
  }
  return detail::finish(5, "forced constancy of mean-preserving functionals", t);
}

inline CriterionResult criterion_preserver_residuals(std::uint64_t seed, double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  const auto c = ScalarFunctional::constant(1.7);
  double worst_const = 0.0, worst_lin = 0.0;
  for (int k = 0; k < 100; ++k) {
    Rng rng = sample_rng(seed + 600, static_cast<std::uint64_t>(k));
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    for (const auto& kind : {MeanKind::kubo_ando_power(0.5), MeanKind::kubo_ando_power(-0.5),
                             MeanKind::wasserstein()})
      worst_const = std::max(worst_const, preserver_residual(c, kind, a, b));
    const auto lin = ScalarFunctional::positive_linear(random_psd(2, rng));
    worst_lin = std::max(worst_lin, preserver_residual(lin, MeanKind::arithmetic(), a, b));
  }
  t.at_most("constant functional residual", worst_const, 1e-13);
  t.at_most("positive linear residual (arithmetic)", worst_lin, 1e-12);
  const auto [a, b] = eps_pair(0.5);
  t.at_least("trace-power residual on (A_0.5, B_0.5)",
             preserver_residual(ScalarFunctional::trace_power(0.5), MeanKind::kubo_ando_power(0.5), a, b),
             1e-4);
  return detail::finish(6, "preserver residuals", t);
}

inline CriterionResult criterion_axioms(std::uint64_t seed, double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  AxiomTolerances tol;
  tol.normalization *= tol_scale;
  tol.loewner *= tol_scale;
  tol.transformer *= tol_scale;
  tol.continuity *= tol_scale;
  for (const auto& kind : {MeanKind::harmonic(), MeanKind::geometric(), MeanKind::kubo_ando_power(0.5),
                           MeanKind::kubo_ando_power(-0.5)})
    for (std::size_t dim : {2u, 3u}) {
      const auto rep = check_kubo_ando_axioms(kind, 200, seed + 700, dim, tol);
      for (const auto& ax : rep.axioms)
        t.flag(kind.name() + " dim " + std::to_string(dim) + " " + ax.axiom + ": " +
                   std::to_string(ax.failures) + " failures",
               ax.failures == 0);
    }
  return detail::finish(7, "Kubo-Ando axioms", t);
}

inline CriterionResult criterion_mean_coincidences(std::uint64_t seed, double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  double kc[2] = {0, 0}, wc = 0, alt = 0;
  for (int k = 0; k < 100; ++k) {
    Rng rng = sample_rng(seed + 800, static_cast<std::uint64_t>(k));
    const auto [a, b] = random_commuting_pair(2, rng);
    for (int i = 0; i < 2; ++i) {
      const double p = i ? -0.5 : 0.5;
      kc[i] = std::max(kc[i], max_abs_diff(mean(MeanKind::kubo_ando_power(p), a, b),
                                           mean(MeanKind::conventional_power(p), a, b)));
    }
    wc = std::max(wc, max_abs_diff(mean(MeanKind::wasserstein(), a, b),
                                   mean(MeanKind::conventional_power(0.5), a, b)));
    const PdMatrix x = random_pd(2, rng), y = random_pd(2, rng);
    alt = std::max(alt, max_abs_diff(mean(MeanKind::wasserstein(), x, y), wasserstein_alt(x, y)));
  }
  t.at_most("m_0.5 vs conventional (commuting)", kc[0], 1e-10);
  t.at_most("m_-0.5 vs conventional (commuting)", kc[1], 1e-10);
  t.at_most("Wasserstein vs conventional 1/2 (commuting)", wc, 1e-10);
  t.at_most("Wasserstein formulas (non-commuting)", alt, 1e-11);
  return detail::finish(8, "mean coincidences", t);
}

inline CriterionResult criterion_centrality(std::uint64_t seed, double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  const auto pb = pauli_basis();
  const HermitianMatrix id = HermitianMatrix::identity(2);
  const std::vector<MeanKind> kinds = {MeanKind::wasserstein(), MeanKind::kubo_ando_power(0.5)};
  const PdMatrix scalar = PdMatrix::certify(id * 2.5);
  for (const auto& k : kinds) {
    t.flag("scalar A fails probe for " + k.name(), centrality_probe(scalar, k, 50, seed + 900));
    for (int i = 0; i < 10; ++i) {
      Rng rng = sample_rng(seed + 901, static_cast<std::uint64_t>(i));
      t.flag("non-scalar A #" + std::to_string(i) + " passes probe for " + k.name(),
             !centrality_probe(random_pd(2, rng), k, 50, seed + 902 + i));
    }
  }

  std::vector<std::pair<PdMatrix, PdMatrix>> commuting = {
      {PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({9, 16})}};
  for (int i = 0; i < 5; ++i) {
    Rng rng = sample_rng(seed + 903, static_cast<std::uint64_t>(i));
    commuting.push_back(random_commuting_pair(2, rng));
  }
  const PdMatrix ga = PdMatrix::diagonal({1, 4});
  const PdMatrix gb = PdMatrix::certify(id + 0.6 * pb.sigma_x);

  auto chains = [](const PdMatrix& a, const PdMatrix& b) {
    std::vector<ChainReport> out = {remark1_identity_chain(a, b)};
    for (double p : {0.5, -0.5, -1.0}) out.push_back(remark2_identity_chain(a, b, p));
    return out;
  };
  double worst_commuting = 0.0;
  for (const auto& [a, b] : commuting)
    for (const auto& c : chains(a, b))
      for (const auto& g : c.gaps) worst_commuting = std::max(worst_commuting, g.value);
  t.at_most("largest gap on commuting pairs", worst_commuting, 1e-11);
  for (const auto& c : chains(ga, gb)) {
    double least = HUGE_VAL;
    for (const auto& g : c.gaps) least = std::min(least, g.value);
    t.at_least("smallest gap on generic pair, " + c.label, least, 1e-3);
  }
  const auto m = remark1_identity_chain(PdMatrix::certify(id + 0.5 * pb.sigma_z),
                                        PdMatrix::certify(id + 0.5 * pb.sigma_x));
  t.at_most("matched family hypothesis gap", m.hypothesis_gap(), 1e-11);
  t.at_least("matched family [A,B] gap", m.gap("AB-BA"), 1e-3);
  return detail::finish(9, "centrality probes and identity chains", t);
}

inline CriterionResult criterion_geometry(std::uint64_t seed, double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  double neg = 0, asym = 0, self = 0, tri = 0;
  for (int k = 0; k < 200; ++k) {
    Rng rng = sample_rng(seed + 1000, static_cast<std::uint64_t>(k));
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng), c = random_pd(2, rng);
    const double ab = d_bw(a, b), bc = d_bw(b, c), ac = d_bw(a, c);
    neg = std::max(neg, -std::min(ab, 0.0));
    asym = std::max(asym, std::abs(ab - d_bw(b, a)));
    self = std::max(self, d_bw(a, a));
    tri = std::max(tri, ac - ab - bc);
  }
  t.at_most("negative distance", neg, 0.0);
  t.at_most("asymmetry", asym, 1e-11);
  t.at_most("d(A,A)", self, 1e-12);
  t.at_most("triangle slack", tri, 1e-10);

  double ends = 0, mid_trace = 0, mid_bw = 0, additivity = 0;
  for (int k = 0; k < 50; ++k) {
    Rng rng = sample_rng(seed + 1001, static_cast<std::uint64_t>(k));
    const PdMatrix a = random_pd(2, rng), b = random_pd(2, rng);
    for (auto kind : {GeodesicKind::GeometricTrace, GeodesicKind::BuresWasserstein}) {
      ends = std::max(ends, max_abs_diff(geodesic(kind, a, b, 0.0), a));
      ends = std::max(ends, max_abs_diff(geodesic(kind, a, b, 1.0), b));
    }
    mid_trace = std::max(mid_trace, max_abs_diff(geodesic(GeodesicKind::GeometricTrace, a, b, 0.5),
                                                 mean(MeanKind::geometric(), a, b)));
    mid_bw = std::max(mid_bw, max_abs_diff(geodesic(GeodesicKind::BuresWasserstein, a, b, 0.5),
                                           mean(MeanKind::wasserstein(), a, b)));
    additivity = std::max(additivity, check_geodesic_metric(a, b, {0, 0.25, 0.5, 0.75, 1}) / d_bw(a, b));
  }
  t.at_most("geodesic endpoints", ends, 1e-11);
  t.at_most("trace geodesic midpoint vs geometric mean", mid_trace, 1e-10);
  t.at_most("BW geodesic midpoint vs Wasserstein mean", mid_bw, 1e-10);
  t.at_most("relative additivity defect", additivity, 1e-8);
  const PdMatrix id = PdMatrix::identity(2);
  const PdMatrix four = PdMatrix::certify(HermitianMatrix::identity(2) * 4.0);
  t.at_most("d_bw(I, 4I) - sqrt 2", std::abs(d_bw(id, four) - std::sqrt(2.0)), 1e-12);
  return detail::finish(10, "Bures-Wasserstein geometry", t);
}

inline CriterionResult criterion_cubic_scaling(double tol_scale = 1.0) {
  detail::Tally t(tol_scale);
  const EpsGrid grid = EpsGrid::default_grid();
  auto residual = [](const EpsGrid& g) {
    return std::get<double>(check_power_mean_expansion(0.5, g).at("residual_bound").observed);
  };
  t.within("log2 residual ratio", std::log2(residual(grid.scaled(2.0)) / residual(grid)), 2.5, 3.5);
  return detail::finish(11, "cubic residual scaling", t);
}

inline CriterionResult run_criterion(int id, std::uint64_t seed, double tol_scale = 1.0) {
  switch (id) {
    case 1: return criterion_unitary_invariance(tol_scale);
    case 2: return criterion_power_mean_expansion(tol_scale);
    case 3: return criterion_wasserstein_expansion(tol_scale);
    case 4: return criterion_gp_derivatives(tol_scale);
    case 5: return criterion_forced_constancy(tol_scale);
    case 6: return criterion_preserver_residuals(seed, tol_scale);
    case 7: return criterion_axioms(seed, tol_scale);
    case 8: return criterion_mean_coincidences(seed, tol_scale);
    case 9: return criterion_centrality(seed, tol_scale);
    case 10: return criterion_geometry(seed, tol_scale);
    case 11: return criterion_cubic_scaling(tol_scale);
    default: throw DomainError("no criterion " + std::to_string(id) + " (expected 1.." +
                               std::to_string(kCriterionCount) + ")");
  }
}

inline std::vector<CriterionResult> run_all_criteria(std::uint64_t seed, double tol_scale = 1.0) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, seed, tol_scale));
  return out;
}

}  // namespace meanlab
