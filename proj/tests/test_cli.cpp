#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causal/cli.hpp"
#include "causal/io.hpp"
#include "causal/reference_models.hpp"
#include "causal/timeseries.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace causal;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "causal-strength");
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "causal_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else cell += c;
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double h2(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

const char* kSem = R"({"dag":{"nodes":["X1","X2"],"edges":[["X1","X2"]]},
  "coefficients":[["X1","X2",1.0]],"noise_vars":{"X1":1,"X2":1}})";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"bogus"}).status == 2);
  CHECK(run({"strength-discrete"}).status == 2);
  CHECK(run({"strength-discrete", "--model", "/nonexistent.json"}).status == 2);
  CHECK(run({"repro", "fig42"}).status == 2);
  const auto bad = scratch("bad.json", "{\"dag\": {\n\"nodes\": [1, }");
  const auto r = run({"strength-discrete", "--model", bad.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("bad.json:2:") != std::string::npos);
  const auto model = scratch("b3.json", to_json(reference::broadcast(3)));
  CHECK(run({"strength-discrete", "--model", model.string(), "--measure", "nonsense"}).status == 2);
  CHECK(run({"strength-discrete", "--model", model.string(), "--edges", "all-into:Q"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("broadcast with three receivers carries three bits") {
  const auto model = scratch("b3.json", to_json(reference::broadcast(3)));
  const auto r = run({"strength-discrete", "--model", model.string(), "--edges", "all-arrows|all-single-arrows"});
  REQUIRE(r.status == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"edge_set", "measure", "value", "unit", "error"});
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(3.0).epsilon(1e-12));
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) == doctest::Approx(1.0));
  const auto nats = run({"strength-discrete", "--model", model.string(), "--edges", "X->Y1", "--base", "nats"});
  CHECK(std::stod(parse_csv(nats.out)[1][2]) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("per-row failures are flagged and set exit 1") {
  const auto model = scratch("b2.json", to_json(reference::broadcast(2)));
  const auto r = run({"strength-discrete", "--model", model.string(), "--edges", "all-arrows|X->Y1", "--measure",
                      "ace"});
  CHECK(r.status == 1);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][2].empty());
  CHECK(!rows[1][4].empty());
  CHECK(std::stod(rows[2][2]) == doctest::Approx(1.0));
  CHECK(rows[2][4].empty());

  const auto unknown_edge = run({"strength-discrete", "--model", model.string(), "--edges", "Y1->X"});
  CHECK(unknown_edge.status == 1);

  ::setenv("CS_STATE_CAP", "4", 1);
  const auto capped = run({"strength-discrete", "--model", model.string(), "--edges", "all-arrows"});
  ::unsetenv("CS_STATE_CAP");
  CHECK(capped.status == 1);
  CHECK(parse_csv(capped.out)[1][4].find("state") != std::string::npos);
}

TEST_CASE("discrete measures") {
  const auto model = scratch("xor.json", to_json(reference::xor_confounded(0.5)));
  const auto r = run({"strength-discrete", "--model", model.string(), "--edges", "X->Y", "--measure",
                      "causal-strength,cmi,observed-influence,info-flow-se,te"});
  CHECK(r.status == 1);  // te is not defined on a static model
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0));
  CHECK(std::abs(std::stod(rows[2][2])) < 1e-12);
  CHECK(std::stod(rows[4][2]) == doctest::Approx(1.0));
  CHECK(rows[5][1] == "te");
  CHECK(!rows[5][4].empty());
}

TEST_CASE("linear strength, simulation and estimation") {
  const auto sem = scratch("sem.json", kSem);
  const auto lin = run({"strength-linear", "--model", sem.string(), "--measure", "causal-strength,cmi"});
  REQUIRE(lin.status == 0);
  const auto rows = parse_csv(lin.out);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

  const auto data = fs::temp_directory_path() / "causal_cli_test" / "data.csv";
  REQUIRE(run({"simulate-linear", "--model", sem.string(), "--count", "4000", "--seed", "5", "--out",
               data.string()})
              .status == 0);
  std::ifstream in(data);
  std::string header;
  std::getline(in, header);
  CHECK(header == "X1,X2");

  const auto est = run({"estimate", "--model", sem.string(), "--data", data.string(), "--edges", "X1->X2|{}",
                        "--seed", "2"});
  REQUIRE(est.status == 0);
  const auto er = parse_csv(est.out);
  CHECK(er[0] == std::vector<std::string>{"edge_set", "seed", "estimated", "computed", "unit", "error"});
  CHECK(std::stod(er[1][2]) == doctest::Approx(0.5 * std::log(2.0)).epsilon(0.25));
  CHECK(std::stod(er[1][3]) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(er[2][0] == "{}");
  CHECK(std::abs(std::stod(er[2][2])) < 0.05);

  // A bare graph gives estimates without the computed column.
  const auto dag = scratch("dag.json", R"({"nodes":["X1","X2"],"edges":[["X1","X2"]]})");
  const auto bare = run({"estimate", "--model", dag.string(), "--data", data.string(), "--seed", "2"});
  REQUIRE(bare.status == 0);
  const auto br = parse_csv(bare.out);
  CHECK(br[1][2] == er[1][2]);
  CHECK(br[1][3].empty());
}

TEST_CASE("timeseries subcommand") {
  const auto var = scratch("var.json", to_json(coupled_ar1(0.25)));
  const auto traj = fs::temp_directory_path() / "causal_cli_test" / "traj.csv";
  const auto r = run({"timeseries", "--model", var.string(), "--length", "20000", "--seed", "1", "--trajectory-out",
                      traj.string()});
  REQUIRE(r.status == 0);
  const auto rows = parse_csv(r.out);
  CHECK(std::stod(rows[1][5]) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-10));
  CHECK(std::stod(rows[1][6]) == doctest::Approx(0.5 * std::log(2 - 0.0625)).epsilon(1e-10));
  const auto from_file = run({"timeseries", "--data", traj.string(), "--seed", "1"});
  REQUIRE(from_file.status == 0);
  CHECK(parse_csv(from_file.out)[1][4] == rows[1][4]);
  CHECK(run({"timeseries"}).status == 2);
}

TEST_CASE("repro xor matches the closed forms") {
  const auto r = run({"repro", "xor"});
  REQUIRE(r.status == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = std::stod(rows[i][0]);
    CHECK(std::stod(rows[i][1]) == doctest::Approx(h2(a)).epsilon(1e-10));
    CHECK(std::stod(rows[i][2]) == doctest::Approx(-std::log2(a * a + (1 - a) * (1 - a))).epsilon(1e-10));
  }
}

TEST_CASE("repro example7 endpoints") {
  const auto rows = parse_csv(run({"repro", "example7"}).out);
  CHECK(rows[1][0] == "0");
  CHECK(std::stod(rows[1][1]) == 0.0);
  CHECK(std::stod(rows[1][2]) == 1.0);
  CHECK(std::abs(std::stod(rows.back()[2])) < 1e-12);
}

TEST_CASE("repro output is deterministic") {
  const auto a = run({"repro", "fig6", "--seeds", "1", "--jobs", "3"});
  const auto b = run({"repro", "fig6", "--seeds", "1", "--jobs", "1"});
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(parse_csv(a.out).size() == 21);
  const auto c = run({"repro", "fig6", "--seeds", "1", "--seed", "7"});
  CHECK(c.out != a.out);
}
