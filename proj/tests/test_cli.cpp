#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "meanlab_cli.hpp"

using namespace meanlab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "meanlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

io::Json json_of(const Outcome& o) { return io::Json::parse(o.out); }

const std::string kTwoI = R"({"dim": 2, "re": [[2, 0], [0, 2]], "im": [[0, 0], [0, 0]]})";
const std::string kSixI = R"({"dim": 2, "re": [[6, 0], [0, 6]]})";
const std::string kDiag14 = R"({"dim": 2, "re": [[1, 0], [0, 4]]})";
const std::string kGeneric = R"({"dim": 2, "re": [[1, 0.6], [0.6, 1]]})";

}  // namespace

TEST_CASE("matrix JSON round trip") {
  Rng rng = sample_rng(40, 0);
  const Matrix m = random_gaussian_matrix(3, rng);
  const Matrix back = io::matrix_from_json(io::to_json(m));
  CHECK(max_abs_diff(m, back) == 0.0);
  const Matrix r = io::matrix_from_json(io::Json::parse(kSixI));
  CHECK(r(1, 1) == Complex(6.0, 0.0));
  CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse(R"({"re": [[1, 2]]})")), DomainError);
  CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse(R"({"dim": 3, "re": [[1]]})")), DomainError);
  CHECK_THROWS_AS(io::read_matrix("/nonexistent/matrix.json"), DomainError);
}

TEST_CASE("mean of 2I and 6I under the harmonic mean is 3I") {
  const auto o = invoke({"mean", "--kind", "harmonic", "--a", kTwoI, "--b", kSixI, "--json"});
  REQUIRE(o.code == 0);
  const Matrix m = io::matrix_from_json(json_of(o)["result"]);
  CHECK(max_abs_diff(m, Matrix::identity(2) * 3.0) <= 1e-14);

  const auto text = invoke({"mean", "--kind", "harmonic", "--a", kTwoI, "--b", kSixI});
  CHECK(text.code == 0);
  CHECK_THAT(text.out, ContainsSubstring("3 0"));
}

TEST_CASE("matrix files are accepted") {
  const std::string path = "test_cli_matrix_a.json";
  {
    std::ofstream f(path);
    f << kTwoI;
  }
  const auto o = invoke({"dbw", "--a", path, "--b", path, "--json"});
  std::remove(path.c_str());
  REQUIRE(o.code == 0);
  CHECK(json_of(o)["result"]["d_bw"].get<double>() <= 1e-14);
}

TEST_CASE("reports carry the schema tag") {
  const auto o = invoke({"dbw", "--a", kTwoI, "--b", kSixI, "--json"});
  const auto j = json_of(o);
  CHECK(j["schema"] == "meanlab-report/1");
  CHECK(j["command"] == "dbw");
  CHECK_FALSE(j.contains("elapsed_ms"));
  // sqrt(2) * |sqrt 2 - sqrt 6|
  CHECK_THAT(j["result"]["d_bw"].get<double>(), WithinAbs(std::sqrt(2.0) * (std::sqrt(6.0) - std::sqrt(2.0)), 1e-12));
}

TEST_CASE("JSON output is deterministic for a fixed seed") {
  const std::vector<std::string> args = {"--seed", "5", "--json", "preserver", "--mean", "wasserstein",
                                         "--functional", "positive-linear", "--pairs", "10"};
  const auto a = invoke(args), b = invoke(args);
  CHECK(a.out == b.out);
  const auto c = invoke({"axioms", "--kind", "geometric", "--samples", "20", "--seed", "9", "--json"});
  const auto d = invoke({"axioms", "--kind", "geometric", "--samples", "20", "--seed", "9", "--json"});
  CHECK(c.code == 0);
  CHECK(c.out == d.out);
  const auto e = invoke({"axioms", "--kind", "geometric", "--samples", "20", "--seed", "10", "--json"});
  CHECK(c.out != e.out);
}

TEST_CASE("axiom reports serialize per axiom") {
  const auto o = invoke({"axioms", "--kind", "kubo-ando", "--p", "0.5", "--samples", "20", "--json"});
  REQUIRE(o.code == 0);
  const auto axioms = json_of(o)["result"]["axioms"];
  REQUIRE(axioms.size() == 5);
  for (const auto& a : axioms) {
    CHECK(a.contains("axiom"));
    CHECK(a["samples"] == 20);
    CHECK(a["failures"] == 0);
    CHECK(a.contains("worst_violation"));
  }
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"mean", "--kind", "harmonic", "--a", kTwoI}).code == 2);
  CHECK(invoke({"mean", "--kind", "nonsense", "--a", kTwoI, "--b", kSixI}).code == 2);
  CHECK(invoke({"mean", "--kind", "kubo-ando", "--a", kTwoI, "--b", kSixI}).code == 2);
  CHECK(invoke({"mean", "--kind", "harmonic", "--a", R"({"re": [[1, 2], [0, 1]]})", "--b", kSixI}).code == 2);
  CHECK(invoke({"mean", "--kind", "harmonic", "--a", R"({"re": [[-1, 0], [0, 1]]})", "--b", kSixI}).code == 2);
  CHECK(invoke({"axioms", "--kind", "wasserstein"}).code == 2);
  CHECK(invoke({"geodesic", "--a", kTwoI, "--b", kSixI, "--t", "1.5"}).code == 2);
  CHECK(invoke({"verify"}).code == 2);
  CHECK(invoke({"verify", "--criterion", "12"}).code == 2);
  CHECK(invoke({"--tol-scale", "0", "dbw", "--a", kTwoI, "--b", kSixI}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK_THAT(help.out, ContainsSubstring("verify"));
  const auto bad = invoke({"mean", "--kind", "nonsense", "--a", kTwoI, "--b", kSixI});
  CHECK_THAT(bad.err, ContainsSubstring("nonsense"));
  CHECK(bad.out.empty());
}

TEST_CASE("check failures exit 1") {
  // trace-power functional does not preserve m_0.5
  const auto o = invoke({"preserver", "--mean", "kubo-ando", "--p", "0.5", "--functional", "trace-power",
                         "--q", "0.5", "--pairs", "5"});
  CHECK(o.code == 1);
  const auto c = invoke({"preserver", "--mean", "kubo-ando", "--p", "0.5", "--functional", "constant",
                         "--value", "3", "--pairs", "20"});
  CHECK(c.code == 0);
  const auto s = invoke({"centrality", "--kind", "wasserstein", "--a", kDiag14, "--samples", "10",
                         "--expect", "central"});
  CHECK(s.code == 1);
  CHECK(invoke({"centrality", "--kind", "wasserstein", "--a", kDiag14, "--samples", "10", "--expect",
                "non-central"})
            .code == 0);
}

TEST_CASE("tol-scale loosens tolerances") {
  const std::vector<std::string> base = {"preserver", "--mean", "kubo-ando", "--p", "0.5",
                                         "--functional", "trace-power", "--pairs", "3", "--tol", "1e-6"};
  CHECK(invoke(base).code == 1);
  auto loose = base;
  loose.insert(loose.begin(), {"--tol-scale", "1e6"});
  CHECK(invoke(loose).code == 0);
}

TEST_CASE("expand reports fitted coefficients") {
  const auto o = invoke({"expand", "--mean", "kubo-ando", "--p", "1", "--json"});
  CHECK(o.code == 0);
  const auto j = json_of(o);
  CHECK(j["parameters"]["grid"].size() == 6);
  const Matrix c1 = io::matrix_from_json(j["result"]["fitted.c1"]);
  const auto pb = pauli_basis();
  CHECK(max_abs_diff(c1, (pb.sigma_z.matrix() + pb.sigma_x.matrix()) * 0.5) <= 1e-6);

  const auto w = invoke({"expand", "--mean", "wasserstein", "--grid", "0.01:0.1:6", "--json"});
  const auto wj = json_of(w);
  bool found = false;
  for (const auto& c : wj["checks"])
    if (c["name"] == "sqrt.c2") found = true;
  CHECK(found);
  CHECK(invoke({"expand", "--mean", "harmonic"}).code == 2);
  CHECK(invoke({"expand", "--mean", "kubo-ando", "--p", "0.5", "--grid", "0.01:0.5:6"}).code == 2);
}

TEST_CASE("preserver solve mode reports the null space") {
  const auto o = invoke({"preserver", "--mean", "arithmetic", "--json"});
  CHECK(o.code == 0);
  const auto j = json_of(o);
  CHECK(j["result"]["null_space"].size() == 3);
  CHECK(j["result"]["unknowns"][0] == "c_I");
}

TEST_CASE("masa functional with c_I = 0 preserves the power mean") {
  const auto o = invoke({"preserver", "--mean", "kubo-ando", "--p", "-0.5", "--functional", "masa",
                         "--c-identity", "0", "--pairs", "10"});
  CHECK(o.code == 0);
  CHECK(invoke({"preserver", "--mean", "kubo-ando", "--p", "-0.5", "--functional", "masa", "--c-identity",
                "0.2", "--c-sigma-z", "0.5"})
            .code == 2);
}

TEST_CASE("centrality probe and chains") {
  const auto o = invoke({"centrality", "--kind", "wasserstein", "--a", kTwoI, "--samples", "7", "--seed", "7",
                         "--json"});
  REQUIRE(o.code == 0);
  const auto j = json_of(o);
  CHECK(j["result"]["central"] == true);
  CHECK(j["result"]["reports"].size() == 7);
  CHECK(j["result"]["reports"][0].contains("commutator_norm"));

  const auto c = invoke({"centrality", "--a", kDiag14, "--b", kGeneric, "--chain", "remark2", "--p", "-1",
                         "--json"});
  REQUIRE(c.code == 0);
  CHECK(json_of(c)["result"]["gaps"]["harmonic_vs_arithmetic"].get<double>() > 1e-3);
  CHECK(invoke({"centrality", "--a", kDiag14, "--b", kGeneric, "--chain", "remark2"}).code == 2);
  CHECK(invoke({"centrality", "--kind", "geometric", "--a", kDiag14}).code == 2);
}

TEST_CASE("geodesic and dbw commands") {
  const std::string one = R"({"re": [[1, 0], [0, 1]]})", nine = R"({"re": [[9, 0], [0, 9]]})";
  const auto g = invoke({"geodesic", "--kind", "bw", "--a", one, "--b", nine, "--t", "0.5"});
  REQUIRE(g.code == 0);
  // text mode prints the matrix JSON on its first line
  const auto first = g.out.substr(0, g.out.find('\n'));
  CHECK(max_abs_diff(io::matrix_from_json(io::Json::parse(first)), Matrix::identity(2) * 4.0) <= 1e-12);

  const auto t = invoke({"geodesic", "--kind", "trace", "--a", kDiag14, "--b",
                         R"({"re": [[4, 0], [0, 1]]})", "--json"});
  CHECK(max_abs_diff(io::matrix_from_json(json_of(t)["result"]), Matrix::identity(2) * 2.0) <= 1e-12);

  const auto d = invoke({"dbw", "--a", one, "--b", R"({"re": [[4, 0], [0, 4]]})"});
  CHECK_THAT(std::stod(d.out), WithinAbs(std::sqrt(2.0), 1e-10));

  const auto p = invoke({"dbw", "--a", kDiag14, "--b", kGeneric, "--partition", "0,0.25,0.5,0.75,1"});
  CHECK(p.code == 0);
  CHECK(invoke({"dbw", "--a", kDiag14, "--b", kGeneric, "--partition", "0,x,1"}).code == 2);
  CHECK(invoke({"dbw", "--a", kDiag14, "--b", R"({"re": [[1]]})"}).code == 2);
}

TEST_CASE("verify runs a single criterion") {
  const auto o = invoke({"verify", "--criterion", "1", "--json"});
  CHECK(o.code == 0);
  const auto j = json_of(o);
  REQUIRE(j["result"].size() == 1);
  CHECK(j["result"][0]["id"] == 1);
  CHECK(j["result"][0]["pass"] == true);
}

TEST_CASE("--out writes the report to a file") {
  const std::string path = "test_cli_report.json";
  const auto o = invoke({"--json", "--out", path, "dbw", "--a", kTwoI, "--b", kTwoI});
  CHECK(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream f(path);
  const auto j = io::Json::parse(f);
  f.close();
  std::remove(path.c_str());
  CHECK(j["command"] == "dbw");
}
