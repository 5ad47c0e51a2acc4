#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"

// End-to-end tests against the installed command-line binary.  The build
// passes its location through SHARPNORM_CLI_PATH.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string capture = "/tmp/sharpnorm_cli_test_" + std::to_string(counter++) + ".out";
  const std::string cmd =
      std::string(SHARPNORM_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(capture);
  std::remove(capture.c_str());
  return r;
}

}  // namespace

TEST_CASE("no subcommand / unknown flags fail cleanly") {
  CHECK(run("").exit_code != 0);
  CHECK(run("--definitely-not-a-flag").exit_code != 0);
  CHECK(run("constants --format yaml").exit_code != 0);
}

TEST_CASE("constants: passes, human output ends with PASS") {
  auto r = run("constants --rel-tol 1e-11");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("constants: json schema and payload") {
  auto r = run("constants --format json --rel-tol 1e-11");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == 1);
  CHECK(doc["command"] == "constants");
  CHECK(doc["pass"] == true);
  CHECK(doc.contains("library_version"));
  CHECK(doc["config"]["rel_tol"] == 1e-11);
  CHECK(doc["constants"]["sharp_constant"].get<double>() ==
        doctest::Approx(3.46740110027234).epsilon(1e-13));
  REQUIRE(doc["checks"].is_array());
  CHECK(doc["checks"].size() >= 8);
  for (const auto& row : doc["checks"]) {
    CHECK(row["ok"] == true);
    CHECK(row["reason"].is_null());
  }
}

TEST_CASE("constants: csv output has a header and one row per check") {
  auto r = run("constants --format csv --rel-tol 1e-11");
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "name,computed,expected,rel_delta,ok");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows >= 8);
}

TEST_CASE("constants: hopeless tolerance turns into a clean failure exit") {
  auto r = run("constants --rel-tol 1e-30 --check-tol 1e-14");
  CHECK(r.exit_code == 1);
}

TEST_CASE("output file option writes the report to disk") {
  const std::string path = "/tmp/sharpnorm_cli_test_output.json";
  auto r = run("constants --format json --rel-tol 1e-10 -o " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  auto doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["pass"] == true);
  std::remove(path.c_str());
}

TEST_CASE("config file: flat key=value mirrors the flags") {
  const std::string cfg_path = "/tmp/sharpnorm_cli_test.cfg";
  {
    std::ofstream f(cfg_path);
    f << "format=json\n";
    f << "rel-tol=1e-9\n";
  }
  auto r = run("constants --config " + cfg_path);
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["config"]["format"] == "json");
  CHECK(doc["config"]["rel_tol"] == 1e-9);
  std::remove(cfg_path.c_str());
}

TEST_CASE("schur: paper weights reproduce the sharp constant as a limit") {
  auto r = run("schur --format json --rel-tol 1e-10");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["bound"]["sup_value"].get<double>() ==
        doctest::Approx(3.46740110027234).epsilon(1e-6));
  CHECK(doc["bound"]["attained"] == false);
  REQUIRE(doc["roots"].size() == 2);
  CHECK(doc["roots"][0]["root"].get<double>() ==
        doctest::Approx(0.15539357187777).epsilon(1e-10));
  CHECK(doc["roots"][1]["root"].get<double>() ==
        doctest::Approx(0.67147309869895).epsilon(1e-10));
}

TEST_CASE("schur: unweighted choice exceeds the sharp constant but still passes") {
  auto r = run("schur --weights unweighted --format json --rel-tol 1e-9");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["bound"]["sup_value"].get<double>() > 3.4674012);
}

TEST_CASE("schur: a tabulated copy of the canonical weights recovers the bound") {
  const std::string table = "/tmp/sharpnorm_cli_test_weights.csv";
  {
    std::ofstream f(table);
    // Dense log grid sampling h0 = x/(x^2+1), h1 = 1/x over [1e-4, 1e4].
    for (int i = 0; i <= 400; ++i) {
      const double x = std::pow(10.0, -4.0 + 8.0 * i / 400.0);
      f << std::setprecision(17) << x << "," << x / (x * x + 1.0) << "," << 1.0 / x
        << "\n";
    }
  }
  auto r = run("schur --weights custom-table --weight-table " + table +
               " --format json --rel-tol 1e-8");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  const double sup = doc["bound"]["sup_value"].get<double>();
  CHECK(sup > 3.4674011 - 1e-6);
  CHECK(sup < 3.6);
  std::remove(table.c_str());

  // The table is mandatory for this weight choice.
  auto missing = run("schur --weights custom-table --format json");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("rayleigh: quotients increase and the fit is reported") {
  auto r = run("rayleigh --kernel t --deltas 1e2,1e3,1e4 --format json --rel-tol 1e-8");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  REQUIRE(doc["points"].size() == 3);
  double prev = -1.0;
  for (const auto& p : doc["points"]) {
    const double q = p["quotient"].get<double>();
    CHECK(q > prev);
    CHECK(q < 3.4674011);
    CHECK(p["deficit"].get<double>() > 0.0);
    prev = q;
  }
  CHECK(doc["fit"].contains("limit"));
}

TEST_CASE("nystrom: nested eigenvalues below the sharp constant, escape seen") {
  auto r = run("nystrom --kernel t --kmax 3 --nodes-per-decade 60 --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  REQUIRE(doc["rows"].size() == 3);
  double prev = -1.0;
  for (const auto& row : doc["rows"]) {
    const double lam = row["lambda_max"].get<double>();
    CHECK(lam > prev);
    CHECK(lam < 3.4674011);
    prev = lam;
  }
  CHECK(doc["rows"][2]["lambda_max"].get<double>() > 3.2);
  CHECK(doc["escape"]["strictly_increasing"] == true);
}

TEST_CASE("nystrom: matrix export produces a square csv") {
  const std::string path = "/tmp/sharpnorm_cli_test_matrix.csv";
  auto r = run("nystrom --kernel t0 --kmax 1 --nodes-per-decade 16 --export " + path);
  REQUIRE(r.exit_code == 0);
  std::istringstream is(slurp(path));
  std::string line;
  int rows = 0, cols = -1;
  while (std::getline(is, line)) {
    int c = 1;
    for (char ch : line) c += (ch == ',');
    if (cols < 0)
      cols = c;
    else
      CHECK(c == cols);
    ++rows;
  }
  CHECK(rows == cols);
  CHECK(rows >= 16);
  std::remove(path.c_str());
}

TEST_CASE("dominance: zero violations across the channel grid") {
  auto r = run("dominance --lmax 2 --grid 20 --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["total_violations"] == 0);
}

TEST_CASE("stability: margins stay above the threshold; seed reproducibility") {
  const std::string args =
      "stability --Z-frac 0.5,1.0 --trials 4 --seed 987 --format json --rel-tol 1e-8";
  auto r1 = run(args);
  REQUIRE(r1.exit_code == 0);
  auto doc = nlohmann::json::parse(r1.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["worst_margin"].get<double>() >= -1e-8);
  CHECK(doc["config"]["seed"] == 987);
  // Byte-identical rerun under the same seed.
  auto r2 = run(args);
  CHECK(r1.out == r2.out);
  // A different seed draws different supports.
  auto r3 = run(
      "stability --Z-frac 0.5,1.0 --trials 4 --seed 988 --format json --rel-tol 1e-8");
  CHECK(r3.out != r1.out);
}

TEST_CASE("SHARPNORM_THREADS is honored in the config echo") {
  auto r = run("constants --format json --rel-tol 1e-10");
  // run() inherits the environment; set it for one invocation only.
  const std::string capture = "/tmp/sharpnorm_cli_test_threads.out";
  const std::string cmd = std::string("SHARPNORM_THREADS=3 ") + SHARPNORM_CLI_PATH +
                          " constants --format json --rel-tol 1e-10 > " + capture;
  REQUIRE(std::system(cmd.c_str()) == 0);
  auto doc = nlohmann::json::parse(slurp(capture));
  CHECK(doc["config"]["threads"] == 3);
  auto base = nlohmann::json::parse(r.out);
  CHECK(base["config"]["threads"] == 1);
  std::remove(capture.c_str());
}
