#pragma once

// JSON encodings for matrices and reports. Matrices use
// {"dim": n, "re": [[...]], "im": [[...]]}, row-major; "im" is optional on input.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "meanlab/acceptance.hpp"
#include "meanlab/centrality.hpp"
#include "meanlab/checks.hpp"
#include "meanlab/means.hpp"
#include "meanlab/preserver.hpp"

namespace meanlab::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "meanlab-report/1";

inline Json to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json rr = Json::array(), ir = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return Json{{"dim", m.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re")) throw DomainError("matrix JSON needs an object with \"re\"");
  const Json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw DomainError("matrix JSON: \"re\" must be a non-empty array of rows");
  const std::size_t n = re.size();
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != n)
    throw DomainError("matrix JSON: \"dim\" does not match the number of rows");
  const Json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (im && (!im->is_array() || im->size() != n)) throw DomainError("matrix JSON: \"im\" has the wrong shape");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!re[i].is_array() || re[i].size() != n) throw DomainError("matrix JSON: matrix must be square");
    if (im && (!(*im)[i].is_array() || (*im)[i].size() != n))
      throw DomainError("matrix JSON: \"im\" has the wrong shape");
    for (std::size_t k = 0; k < n; ++k)
      m(i, k) = Complex(re[i][k].get<double>(), im ? (*im)[i][k].get<double>() : 0.0);
  }
  return m;
}

// Reads a matrix from a file, or from the argument itself when it is inline JSON.
inline Matrix read_matrix(const std::string& source) {
  Json j;
  try {
    if (!source.empty() && source.front() == '{') {
      j = Json::parse(source);
    } else {
      std::ifstream in(source);
      if (!in) throw DomainError("cannot open matrix file '" + source + "'");
      j = Json::parse(in);
    }
  } catch (const Json::exception& e) {
    throw DomainError("invalid matrix JSON in '" + source + "': " + e.what());
  }
  try {
    return matrix_from_json(j);
  } catch (const Json::exception& e) {
    throw DomainError("invalid matrix JSON in '" + source + "': " + e.what());
  }
}

inline PdMatrix read_pd(const std::string& source) { return PdMatrix::certify(HermitianMatrix(read_matrix(source))); }

// Non-finite numbers have no JSON encoding; they become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const CheckValue& v) {
  return std::visit([](const auto& x) -> Json {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) return number(x);
    else return to_json(x);
  }, v);
}

inline Json to_json(const Check& c) {
  return Json{{"name", c.name},
              {"expected", to_json(c.expected)},
              {"observed", to_json(c.observed)},
              {"deviation", number(c.deviation)},
              {"tolerance", number(c.tolerance)},
              {"bound", c.lower_bound ? "lower" : "upper"},
              {"pass", c.pass}};
}

inline Json to_json(const AxiomResult& a) {
  return Json{{"axiom", a.axiom}, {"samples", a.samples}, {"failures", a.failures},
              {"worst_violation", number(a.worst_violation)}};
}

inline Json to_json(const AxiomReport& r) {
  Json axioms = Json::array();
  for (const auto& a : r.axioms) axioms.push_back(to_json(a));
  return Json{{"kind", r.kind}, {"dim", r.dim}, {"seed", r.seed}, {"axioms", std::move(axioms)},
              {"all_passed", r.all_passed()}};
}

inline Json to_json(const CommutatorReport& c) {
  return Json{{"pair_id", c.pair_id}, {"commutator_norm", number(c.commutator_norm)},
              {"tolerance", number(c.tolerance)}, {"commutes", c.commutes}};
}

inline Json to_json(const ChainReport& c) {
  auto gaps = [](const std::vector<Gap>& v) {
    Json out = Json::object();
    for (const auto& g : v) out[g.name] = number(g.value);
    return out;
  };
  Json j{{"label", c.label}, {"tolerance", number(c.tolerance)}, {"gaps", gaps(c.gaps)},
         {"identities", gaps(c.identities)}, {"derivative_gap", number(c.derivative_gap)}};
  j["derivative_error"] = c.derivative_error < 0 ? Json(nullptr) : number(c.derivative_error);
  j["consistent"] = c.consistent();
  return j;
}

inline Json to_json(const Row& r) {
  Json out = Json::array();
  for (double v : r) out.push_back(number(v));
  return out;
}

inline Json to_json(const CoefficientSolveReport& r) {
  Json ns = Json::array();
  for (const auto& v : r.null_space) ns.push_back(to_json(v));
  Json sv = Json::array();
  for (double v : r.singular_values) sv.push_back(number(v));
  Json unknowns = Json::array();
  for (const char* u : kUnknowns) unknowns.push_back(u);
  return Json{{"kind", r.kind},
              {"exponent", r.exponent},
              {"unknowns", std::move(unknowns)},
              {"rows", Json{{"order0", to_json(r.r0)}, {"order1", to_json(r.r1)}, {"order2", to_json(r.r2)}}},
              {"fit_residual", number(r.fit_residual)},
              {"singular_values", std::move(sv)},
              {"null_space", std::move(ns)},
              {"c_identity_extent", number(r.c_identity_extent)},
              {"c_identity_forced", r.c_identity_forced},
              {"first_order_error", number(r.first_order_error)},
              {"second_order_c_identity", number(r.second_order_c_identity)},
              {"second_order_expected", number(r.second_order_expected)},
              {"second_order_row_max", number(r.second_order_row_max)}};
}

inline Json to_json(const CriterionResult& c) {
  return Json{{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}};
}

}  // namespace meanlab::io
