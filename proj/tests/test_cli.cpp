#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = EXCAL_CLI_PATH;
const std::string kConfigs = EXCAL_CONFIG_DIR;
const std::string kTmp = "cli_scratch";

int run(const std::string& args) {
  int status = std::system((kCli + " " + args).c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.is_open());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("identity suites on the bundled regression config exit 0") {
  CHECK(run("check --config " + kConfigs + "/default.json --out " + kTmp + "_ok.json") == 0);
  std::string report = slurp(kTmp + "_ok.json");
  CHECK(report.find("\"pass\": true") != std::string::npos);
  CHECK(report.find("\"tolerance\"") != std::string::npos);
}

TEST_CASE("corrupted weak-divergence candidate exits 1 with a witness") {
  CHECK(run("weakdiv --config " + kConfigs + "/corrupted_weakdiv.json --out " + kTmp +
            "_bad.json") == 1);
  std::string report = slurp(kTmp + "_bad.json");
  CHECK(report.find("\"worst\"") != std::string::npos);
  CHECK(report.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
  // unreadable file
  CHECK(run("check --config " + kTmp + "_missing.json 2> /dev/null") == 2);

  // empty task list
  write(kTmp + "_empty.json",
        R"({"dimension": 2, "domain": {"lo": [-1, -1], "hi": [1, 1]},
            "density": "1", "tasks": []})");
  CHECK(run("check --config " + kTmp + "_empty.json 2> " + kTmp + "_err.txt") == 2);
  CHECK(slurp(kTmp + "_err.txt").find("no tasks") != std::string::npos);

  // task referencing an undeclared object
  write(kTmp + "_undeclared.json",
        R"({"dimension": 2, "domain": {"lo": [-1, -1], "hi": [1, 1]}, "density": "1",
            "tasks": [{"task": "div", "multivector": "nope"}]})");
  CHECK(run("check --config " + kTmp + "_undeclared.json 2> /dev/null") == 2);

  // malformed expression
  write(kTmp + "_badexpr.json",
        R"({"dimension": 2, "domain": {"lo": [-1, -1], "hi": [1, 1]},
            "density": "1 + @", "tasks": [{"task": "lemma1"}]})");
  CHECK(run("check --config " + kTmp + "_badexpr.json 2> /dev/null") == 2);
}

TEST_CASE("reports are byte-identical for identical config and seed") {
  std::string base = "check --config " + kConfigs + "/default.json --seed 7 --out ";
  CHECK(run(base + kTmp + "_a.json") == 0);
  CHECK(run(base + kTmp + "_b.json") == 0);
  CHECK(slurp(kTmp + "_a.json") == slurp(kTmp + "_b.json"));

  // a different seed changes the report
  CHECK(run("check --config " + kConfigs + "/default.json --seed 8 --out " + kTmp +
            "_c.json") == 0);
  CHECK(slurp(kTmp + "_a.json") != slurp(kTmp + "_c.json"));
}

TEST_CASE("csv output is a flat table") {
  CHECK(run("check --config " + kConfigs + "/default.json --format csv --out " + kTmp +
            "_t.csv") == 0);
  std::string csv = slurp(kTmp + "_t.csv");
  CHECK(csv.rfind("task,metric,value\n", 0) == 0);
  CHECK(csv.find("adjunctions,max_rel_i,") != std::string::npos);
}

TEST_CASE("surface subcommand reports the sigma table on the circle config") {
  CHECK(run("surface --config " + kConfigs + "/gaussian_circle.json --out " + kTmp +
            "_s.json") == 0);
  std::string report = slurp(kTmp + "_s.json");
  CHECK(report.find("0.60653") != std::string::npos);
  CHECK(report.find("\"quadrature_error\"") != std::string::npos);
}

TEST_CASE("tolerance override can force a violation") {
  CHECK(run("check --config " + kConfigs + "/default.json --tol 1e-30 --out " + kTmp +
            "_f.json") == 1);
}
