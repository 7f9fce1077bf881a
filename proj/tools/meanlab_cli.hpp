#pragma once

// Command-line front end. run() is separate from main so tests can drive it
// with captured streams. Exit codes: 0 all checks pass, 1 a check failed,
// 2 usage or input error.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meanlab/acceptance.hpp"
#include "meanlab/centrality.hpp"
#include "meanlab/expansion.hpp"
#include "meanlab/geometry.hpp"
#include "meanlab/means.hpp"
#include "meanlab/preserver.hpp"
#include "meanlab/random.hpp"
#include "report_json.hpp"

namespace meanlab::cli {

using io::Json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunReport {
  std::string command;
  Json parameters = Json::object();
  CheckReport checks;
  Json result;
  std::string text_result;  // human-readable rendering of result
  std::vector<std::string> notes;
  long long elapsed_ms = 0;  // text output only; kept out of the JSON body for determinism

  bool passed() const { return checks.passed(); }
};

inline std::string fmt(double v, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

inline std::string format_matrix(const Matrix& m) {
  const double scale = std::max(1.0, m.max_abs());
  bool complex = false;
  for (const auto& z : m.data())
    if (std::abs(z.imag()) > 1e-14 * scale) complex = true;
  std::vector<std::string> cells;
  std::size_t width = 0;
  for (const auto& z : m.data()) {
    std::string s = fmt(z.real());
    if (complex) s += (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
    width = std::max(width, s.size());
    cells.push_back(std::move(s));
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    os << " ";
    for (std::size_t j = 0; j < m.dim(); ++j) os << " " << std::setw(static_cast<int>(width)) << cells[i * m.dim() + j];
    os << "\n";
  }
  return os.str();
}

inline Json report_json(const RunReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks.checks) checks.push_back(io::to_json(c));
  Json notes = Json::array();
  for (const auto& n : r.checks.notes) notes.push_back(n);
  for (const auto& n : r.notes) notes.push_back(n);
  return Json{{"schema", io::kSchema}, {"command", r.command}, {"parameters", r.parameters},
              {"checks", std::move(checks)}, {"result", r.result}, {"notes", std::move(notes)},
              {"pass", r.passed()}};
}

inline std::string report_text(const RunReport& r) {
  std::ostringstream os;
  os << r.text_result;
  if (!r.checks.checks.empty()) {
    std::size_t w = 5;
    for (const auto& c : r.checks.checks) w = std::max(w, c.name.size());
    os << "\n" << std::left << std::setw(static_cast<int>(w)) << "check"
       << "  " << std::setw(14) << "deviation" << "  " << std::setw(14) << "limit" << "  result\n";
    for (const auto& c : r.checks.checks) {
      os << std::left << std::setw(static_cast<int>(w)) << c.name << "  " << std::setw(14)
         << (c.lower_bound ? fmt(std::get<double>(c.observed), 6) : fmt(c.deviation, 6)) << "  "
         << std::setw(14) << ((c.lower_bound ? ">= " : "<= ") + fmt(c.tolerance, 6)) << "  "
         << (c.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  for (const auto& n : r.checks.notes) os << "note: " << n << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  os << (r.passed() ? "PASS" : "FAIL") << " (" << r.elapsed_ms << " ms)\n";
  return os.str();
}

inline MeanKind parse_kind(const std::string& name, const std::optional<double>& p) {
  return MeanKind::parse(name, p);
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("expected a comma-separated list of numbers, got '" + s + "'");
    }
  }
  return out;
}

// Subcommand option storage.
struct Options {
  std::uint64_t seed = 0;
  bool json = false;
  double tol_scale = 1.0;
  std::string out_path;

  std::string kind;
  std::optional<double> p;
  std::string a, b;
  std::string grid;
  std::string functional;
  double value = 1.0;
  double q = 0.5;
  std::string weight;
  int pairs = 100;
  double tol = 1e-12;
  double c_identity = 0.0, c_sigma_z = 0.0, c_sigma_x = 0.0, c_u = 0.0;
  int samples = 100;
  std::size_t dim = 2;
  std::string chain;
  std::string expect;
  double t = 0.5;
  std::string partition;
  bool all = false;
  int criterion = 0;
};

inline EpsGrid grid_of(const Options& o) {
  return o.grid.empty() ? EpsGrid::default_grid() : EpsGrid::parse(o.grid);
}

inline void cmd_mean(const Options& o, RunReport& r) {
  const MeanKind kind = parse_kind(o.kind, o.p);
  const PdMatrix a = io::read_pd(o.a), b = io::read_pd(o.b);
  const PdMatrix m = mean(kind, a, b);
  r.parameters["kind"] = kind.name();
  r.result = io::to_json(m.matrix());
  r.text_result = format_matrix(m.matrix());
  const double scale = std::max(1.0, m.frobenius_norm());
  if (kind.tag() == MeanTag::Wasserstein)
    r.checks.add_bound("alternative_formula", max_abs_diff(m, wasserstein_alt(a, b)) / scale, 1e-11);
  if (kind.tag() == MeanTag::Geometric)
    r.checks.add_bound("ando_certificate", ando_variational_certificate(a, b, m.hermitian()) ? 0.0 : 1.0, 0.0);
}

inline void cmd_expand(const Options& o, RunReport& r) {
  const MeanKind kind = parse_kind(o.kind.empty() ? "kubo-ando" : o.kind, o.p);
  const EpsGrid grid = grid_of(o);
  r.parameters["mean"] = kind.name();
  Json g = Json::array();
  for (double e : grid.values()) g.push_back(e);
  r.parameters["grid"] = std::move(g);
  if (kind.tag() == MeanTag::KuboAndoPower) {
    const double p = kind.p();
    r.checks = check_power_mean_expansion(p, grid);
    for (double eps : {0.1, 0.3, 0.5})
      r.checks.add_bound("unitary_commutator(eps=" + fmt(eps) + ")", check_unitary_invariance(p, eps), 1e-11);
    r.notes.push_back("g_p'(1) = " + fmt(gp_d1(p, 1.0)) + ", g_p''(1) = " + fmt(gp_d2(p, 1.0)) +
                      ", closed-form anchor 1/4(1/p-1) + (p-1)/2 = " + fmt(gp_d2_closed_form_anchor(p)));
    r.result = Json{{"c2_formula", power_mean_c2_formula(p)}};
  } else if (kind.tag() == MeanTag::Wasserstein) {
    r.checks = check_wasserstein_expansion(grid);
    r.result = Json::object();
  } else {
    throw DomainError("expand supports kubo-ando (with --p) and wasserstein, not " + kind.name());
  }
  for (const auto& c : r.checks.checks)
    if (std::holds_alternative<Matrix>(c.observed)) r.result["fitted." + c.name] = io::to_json(std::get<Matrix>(c.observed));
  r.text_result = "expansion of " + kind.name() + "\n";
}

inline ScalarFunctional make_functional(const Options& o, Rng& rng) {
  const auto& f = o.functional;
  if (f == "constant") return ScalarFunctional::constant(o.value);
  if (f == "trace-power") return ScalarFunctional::trace_power(o.q);
  if (f == "lambda-max") return ScalarFunctional::lambda_max();
  if (f == "positive-linear") {
    const HermitianMatrix w = o.weight.empty() ? random_psd(o.dim, rng) : HermitianMatrix(io::read_matrix(o.weight));
    return ScalarFunctional::positive_linear(w);
  }
  if (f == "masa") {
    const auto pb = pauli_basis();
    MasaFunctional m(o.c_identity);
    m.set(pb.sigma_z, o.c_sigma_z).set(pb.sigma_x, o.c_sigma_x).set(pb.u, o.c_u);
    return as_functional(m);
  }
  throw DomainError("unknown functional '" + f + "' (constant, trace-power, lambda-max, positive-linear, masa)");
}

inline void cmd_preserver(const Options& o, RunReport& r) {
  const MeanKind kind = parse_kind(o.kind, o.p);
  r.parameters["mean"] = kind.name();
  if (o.functional.empty()) {
    const auto rep = solve_coefficients(kind, grid_of(o));
    r.checks = rep.checks;
    r.result = io::to_json(rep);
    std::ostringstream os;
    os << "coefficient solve for " << kind.name() << ": null space dimension " << rep.null_space.size()
       << ", c_I extent " << fmt(rep.c_identity_extent) << (rep.c_identity_forced ? " (forced to 0)" : " (free)")
       << "\n";
    r.text_result = os.str();
    return;
  }
  Rng wrng = sample_rng(o.seed, 1u << 20);
  const ScalarFunctional f = make_functional(o, wrng);
  r.parameters["functional"] = f.label();
  const bool single = !o.a.empty() || !o.b.empty();
  if (single && (o.a.empty() || o.b.empty())) throw DomainError("preserver: give both --a and --b, or neither");
  if (!single) r.parameters["pairs"] = o.pairs;
  Json residuals = Json::array();
  double worst = 0.0;
  const std::size_t n = o.functional == "masa" ? 2 : o.dim;
  const int count = single ? 1 : o.pairs;
  for (int i = 0; i < count; ++i) {
    double res;
    if (single) {
      res = preserver_residual(f, kind, io::read_pd(o.a), io::read_pd(o.b));
    } else {
      Rng rng = sample_rng(o.seed, static_cast<std::uint64_t>(i));
      const PdMatrix a = random_pd(n, rng), b = random_pd(n, rng);
      res = preserver_residual(f, kind, a, b);
    }
    residuals.push_back(io::number(res));
    worst = std::max(worst, res);
  }
  r.checks.subject = "preserver residual";
  r.checks.add_bound("max_residual", worst, o.tol);
  r.result = Json{{"worst_residual", io::number(worst)}, {"residuals", std::move(residuals)}};
  r.text_result = "|f(A s B) - f(A) s f(B)| for " + f.label() + " under " + kind.name() + ": worst " +
                  fmt(worst) + " over " + std::to_string(count) + " pair(s)\n";
}

inline void cmd_centrality(const Options& o, RunReport& r) {
  const PdMatrix a = io::read_pd(o.a);
  if (!o.chain.empty()) {
    if (o.b.empty()) throw DomainError("centrality --chain needs --b");
    const PdMatrix b = io::read_pd(o.b);
    ChainReport c;
    if (o.chain == "remark1") {
      c = remark1_identity_chain(a, b);
    } else if (o.chain == "remark2") {
      if (!o.p) throw DomainError("centrality --chain remark2 needs --p");
      c = remark2_identity_chain(a, b, *o.p);
      r.parameters["p"] = *o.p;
    } else {
      throw DomainError("unknown chain '" + o.chain + "' (remark1 or remark2)");
    }
    r.parameters["chain"] = o.chain;
    r.result = io::to_json(c);
    std::ostringstream os;
    os << c.label << " (tolerance " << fmt(c.tolerance) << ")\n";
    for (const auto& g : c.gaps) os << "  gap      " << std::left << std::setw(40) << g.name << fmt(g.value) << "\n";
    for (const auto& g : c.identities)
      os << "  identity " << std::left << std::setw(40) << g.name << fmt(g.value) << "\n";
    r.text_result = os.str();
    return;
  }
  const MeanKind kind = parse_kind(o.kind, o.p);
  const auto probe = centrality_probe_report(a, kind, o.samples, o.seed);
  r.parameters["kind"] = kind.name();
  r.parameters["samples"] = o.samples;
  Json reps = Json::array();
  for (const auto& c : probe.reports) reps.push_back(io::to_json(c));
  r.result = Json{{"reports", std::move(reps)}, {"central", probe.central}, {"worst", io::number(probe.worst)}};
  r.text_result = "A is " + std::string(probe.central ? "central" : "not central") + " for " + kind.name() +
                  " (largest commutator " + fmt(probe.worst) + " over " + std::to_string(o.samples) + " samples)\n";
  if (!o.expect.empty()) {
    if (o.expect != "central" && o.expect != "non-central")
      throw DomainError("--expect takes central or non-central");
    r.checks.add_bound("verdict_matches_expectation", probe.central == (o.expect == "central") ? 0.0 : 1.0, 0.0);
  }
}

inline void cmd_geodesic(const Options& o, RunReport& r) {
  const GeodesicKind kind = parse_geodesic_kind(o.kind.empty() ? "bw" : o.kind);
  const PdMatrix g = geodesic(kind, io::read_pd(o.a), io::read_pd(o.b), o.t);
  r.parameters["kind"] = to_string(kind);
  r.parameters["t"] = o.t;
  r.result = io::to_json(g.matrix());
  r.text_result = r.result.dump() + "\n";
}

inline void cmd_dbw(const Options& o, RunReport& r) {
  const PdMatrix a = io::read_pd(o.a), b = io::read_pd(o.b);
  const double d = d_bw(a, b);
  r.result = Json{{"d_bw", d}};
  r.text_result = fmt(d) + "\n";
  if (!o.partition.empty()) {
    const auto part = parse_list(o.partition);
    Json pj = Json::array();
    for (double v : part) pj.push_back(v);
    r.parameters["partition"] = std::move(pj);
    r.checks.add_bound("geodesic_additivity", check_geodesic_metric(a, b, part), 1e-8 * std::max(d, 1e-300));
  }
}

inline void cmd_axioms(const Options& o, RunReport& r) {
  const MeanKind kind = parse_kind(o.kind, o.p);
  AxiomTolerances tol;
  tol.normalization *= o.tol_scale;
  tol.loewner *= o.tol_scale;
  tol.transformer *= o.tol_scale;
  tol.continuity *= o.tol_scale;
  const auto rep = check_kubo_ando_axioms(kind, o.samples, o.seed, o.dim, tol);
  r.parameters["kind"] = kind.name();
  r.parameters["samples"] = o.samples;
  r.parameters["dim"] = o.dim;
  r.result = io::to_json(rep);
  for (const auto& ax : rep.axioms) r.checks.add_bound(ax.axiom + ".failures", ax.failures, 0.0);
  r.text_result = "Kubo-Ando axioms for " + kind.name() + "\n";
}

inline void cmd_verify(const Options& o, RunReport& r) {
  std::vector<CriterionResult> results;
  if (o.all == (o.criterion != 0)) throw DomainError("verify needs exactly one of --all or --criterion N");
  if (o.all) {
    results = run_all_criteria(o.seed, o.tol_scale);
  } else {
    results.push_back(run_criterion(o.criterion, o.seed, o.tol_scale));
    r.parameters["criterion"] = o.criterion;
  }
  Json arr = Json::array();
  std::ostringstream os;
  for (const auto& c : results) {
    arr.push_back(io::to_json(c));
    r.checks.add_bound("criterion " + std::to_string(c.id), c.pass ? 0.0 : 1.0, 0.0);
    os << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " | " << c.detail << "\n";
  }
  r.result = std::move(arr);
  r.text_result = os.str();
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator means on positive definite matrices: evaluation and numerical checks", "meanlab"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Seed for sampled checks")->capture_default_str();
  app.add_flag("--json", o.json, "Emit a JSON report");
  app.add_option("--tol-scale", o.tol_scale, "Multiply default tolerances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", o.out_path, "Write the report to this file instead of stdout");

  auto add_p = [&](CLI::App* c) { c->add_option("--p", o.p, "Power parameter"); };
  auto add_pair = [&](CLI::App* c, bool required) {
    c->add_option("--a", o.a, "Matrix A (JSON file or inline JSON)")->required(required);
    c->add_option("--b", o.b, "Matrix B (JSON file or inline JSON)")->required(required);
  };

  auto* mean_cmd = app.add_subcommand("mean", "Evaluate A s B");
  mean_cmd->add_option("--kind", o.kind, "Mean kind")->required();
  add_p(mean_cmd);
  add_pair(mean_cmd, true);

  auto* expand_cmd = app.add_subcommand("expand", "Fit the series of A_e s B_e and compare coefficients");
  expand_cmd->add_option("--mean", o.kind, "kubo-ando or wasserstein");
  add_p(expand_cmd);
  expand_cmd->add_option("--grid", o.grid, "Grid lo:hi:n");

  auto* pres_cmd = app.add_subcommand("preserver", "Solve for preserving coefficients or measure residuals");
  pres_cmd->add_option("--mean", o.kind, "Mean kind")->required();
  add_p(pres_cmd);
  pres_cmd->add_option("--grid", o.grid, "Grid lo:hi:n for the coefficient solve");
  pres_cmd->add_option("--functional", o.functional, "constant, trace-power, lambda-max, positive-linear, masa");
  pres_cmd->add_option("--value", o.value, "Constant value")->capture_default_str();
  pres_cmd->add_option("--q", o.q, "Trace-power exponent")->capture_default_str();
  pres_cmd->add_option("--w", o.weight, "Weight matrix for positive-linear");
  pres_cmd->add_option("--c-identity", o.c_identity, "MASA coefficient c_I");
  pres_cmd->add_option("--c-sigma-z", o.c_sigma_z, "MASA coefficient for sigma_z");
  pres_cmd->add_option("--c-sigma-x", o.c_sigma_x, "MASA coefficient for sigma_x");
  pres_cmd->add_option("--c-u", o.c_u, "MASA coefficient for U");
  pres_cmd->add_option("--pairs", o.pairs, "Number of seeded pairs")->check(CLI::PositiveNumber)->capture_default_str();
  pres_cmd->add_option("--dim", o.dim, "Dimension of sampled pairs")->check(CLI::PositiveNumber)->capture_default_str();
  pres_cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();
  add_pair(pres_cmd, false);

  auto* cent_cmd = app.add_subcommand("centrality", "Probe commutation with the arithmetic mean");
  cent_cmd->add_option("--kind", o.kind, "wasserstein, kubo-ando (p < 1) or harmonic");
  add_p(cent_cmd);
  add_pair(cent_cmd, false);
  cent_cmd->get_option("--a")->required();
  cent_cmd->add_option("--samples", o.samples, "Number of probe matrices")->check(CLI::PositiveNumber)->capture_default_str();
  cent_cmd->add_option("--chain", o.chain, "Print an identity chain: remark1 or remark2");
  cent_cmd->add_option("--expect", o.expect, "central or non-central");

  auto* geo_cmd = app.add_subcommand("geodesic", "Point on a geodesic");
  geo_cmd->add_option("--kind", o.kind, "bw or trace");
  add_pair(geo_cmd, true);
  geo_cmd->add_option("--t", o.t, "Curve parameter in [0, 1]")->capture_default_str();

  auto* dbw_cmd = app.add_subcommand("dbw", "Bures-Wasserstein distance");
  add_pair(dbw_cmd, true);
  dbw_cmd->add_option("--partition", o.partition, "Comma-separated t values for the additivity check");

  auto* ax_cmd = app.add_subcommand("axioms", "Sample the Kubo-Ando axioms");
  ax_cmd->add_option("--kind", o.kind, "Mean kind")->required();
  add_p(ax_cmd);
  ax_cmd->add_option("--samples", o.samples, "Samples per axiom")->check(CLI::PositiveNumber)->capture_default_str();
  ax_cmd->add_option("--dim", o.dim, "Matrix dimension")->check(CLI::PositiveNumber)->capture_default_str();

  auto* ver_cmd = app.add_subcommand("verify", "Run acceptance criteria");
  ver_cmd->add_flag("--all", o.all, "Run every criterion");
  ver_cmd->add_option("--criterion", o.criterion, "Run one criterion")->check(CLI::Range(1, kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitUsage;
  }

  RunReport r;
  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    r.command = sub->get_name();
    r.parameters["seed"] = o.seed;
    r.parameters["tol_scale"] = o.tol_scale;
    if (o.p) r.parameters["p"] = *o.p;
    if (sub == mean_cmd) cmd_mean(o, r);
    else if (sub == expand_cmd) cmd_expand(o, r);
    else if (sub == pres_cmd) cmd_preserver(o, r);
    else if (sub == cent_cmd) cmd_centrality(o, r);
    else if (sub == geo_cmd) cmd_geodesic(o, r);
    else if (sub == dbw_cmd) cmd_dbw(o, r);
    else if (sub == ax_cmd) cmd_axioms(o, r);
    else cmd_verify(o, r);
    if (sub != ver_cmd && sub != ax_cmd) r.checks.scale_tolerances(o.tol_scale);
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  r.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

  const std::string body = o.json ? report_json(r).dump(2) + "\n" : report_text(r);
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path);
    if (!f) {
      err << "error: cannot write '" << o.out_path << "'\n";
      return kExitUsage;
    }
    f << body;
  } else {
    out << body;
  }
  return r.passed() ? kExitPass : kExitCheckFailed;
}

}  // namespace meanlab::cli
