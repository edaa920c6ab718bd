#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fbkpp/config.hpp"
#include "fbkpp/csv.hpp"
#include "fbkpp/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace fbkpp;
using namespace fbkpp::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

const char* kMinimalSemiwave = R"(
[experiment]
kind = semiwave

[model]
a = 1 |
b = 1 |
)";

}  // namespace

TEST_CASE("minimal config parses with defaults echoed") {
  const auto outcome = parse_config(kMinimalSemiwave);
  REQUIRE(outcome.ok());
  CHECK(outcome.config->kind == ExperimentKind::Semiwave);
  CHECK(outcome.config->mu == 1.0);
  CHECK(outcome.config->N == 400);
  const std::string echo = emit_config(*outcome.config);
  CHECK(echo.find("mu = 1") != std::string::npos);
  CHECK(echo.find("vanish_tol = 0.0001") != std::string::npos);
}

TEST_CASE("domain errors name the offending field with its line") {
  const auto outcome = parse_config("[experiment]\nkind = semiwave\n[numerics]\ndt = -0.1\n");
  REQUIRE_FALSE(outcome.ok());
  bool found = false;
  for (const auto& e : outcome.errors) found = found || (e.message.find("numerics.dt") != std::string::npos && e.line == 4);
  CHECK(found);
}

TEST_CASE("duplicate keys are rejected") {
  const auto outcome = parse_config("[experiment]\nkind = semiwave\n[numerics]\nmu = 1\nmu = 2\n");
  REQUIRE_FALSE(outcome.ok());
  bool found = false;
  for (const auto& e : outcome.errors) found = found || e.message.find("duplicate") != std::string::npos;
  CHECK(found);
}

TEST_CASE("unknown keys and sections are rejected") {
  CHECK_FALSE(parse_config("[experiment]\nkind = semiwave\n[numerics]\nbogus = 1\n").ok());
  CHECK_FALSE(parse_config("[experiment]\nkind = semiwave\n[mystery]\nx = 1\n").ok());
  CHECK_FALSE(parse_config("[experiment]\nkind = nonsense\n").ok());
}

TEST_CASE("hypothesis violations are config errors") {
  CHECK_FALSE(parse_config("[experiment]\nkind = semiwave\n[model]\na = -1 |\n").ok());
}

TEST_CASE("sweep values parse as lists and logspace") {
  const auto listed = parse_config("[experiment]\nkind = speed_consistency\n[sweep]\nparameter = mu\nvalues = 0.5, 1, 2\n");
  REQUIRE(listed.ok());
  CHECK(listed.config->sweep.values == std::vector<double>{0.5, 1.0, 2.0});

  const auto logs = parse_config("[experiment]\nkind = dichotomy_sweep\n[sweep]\nparameter = mu\nvalues = logspace(0.01, 10, 9)\n");
  REQUIRE(logs.ok());
  REQUIRE(logs.config->sweep.values.size() == 9);
  CHECK(logs.config->sweep.values.front() == doctest::Approx(0.01));
  CHECK(logs.config->sweep.values.back() == doctest::Approx(10.0));
}

TEST_CASE("emit/parse round trip is stable") {
  const auto first = parse_config(kMinimalSemiwave);
  REQUIRE(first.ok());
  const std::string once = emit_config(*first.config);
  const auto second = parse_config(once);
  REQUIRE(second.ok());
  CHECK(emit_config(*second.config) == once);
}

TEST_CASE("identical configs give byte-identical outputs") {
  auto outcome = parse_config(R"(
[experiment]
kind = ode_oracle
[model]
a = 1 | 0.5:1:0
b = 1 |
[numerics]
horizon = 10
)");
  REQUIRE(outcome.ok());
  auto cfg = *outcome.config;
  cfg.output_dir = "harness_det_a";
  const auto rep_a = run_experiment(cfg, 1, true);
  cfg.output_dir = "harness_det_b";
  const auto rep_b = run_experiment(cfg, 1, true);
  CHECK(rep_a.aggregate_pass());
  CHECK(rep_b.aggregate_pass());
  CHECK(slurp("harness_det_a/ode_oracle.csv") == slurp("harness_det_b/ode_oracle.csv"));
  CHECK(!slurp("harness_det_a/ode_oracle.csv").empty());
}

TEST_CASE("a failing probe never takes down the sweep") {
  auto outcome = parse_config(R"(
[experiment]
kind = dichotomy_sweep
[numerics]
N = 100
dt = 0.001
horizon = 20
h0 = 1
g0 = -1
u0_amplitude = 0.5
lstar = 3.141592653589793
[sweep]
parameter = mu
values = 0.05, 100000
)");
  REQUIRE(outcome.ok());
  auto cfg = *outcome.config;
  cfg.output_dir = "harness_sweep_isolation";
  const auto rep = run_experiment(cfg, 1, true);

  bool good_probe = false, failed_probe = false;
  for (const auto& r : rep.records) {
    if (r.name.rfind("mu=0.05", 0) == 0) good_probe = r.pass && r.detail.find("Vanishing") != std::string::npos;
    if (r.name == "mu=100000") failed_probe = !r.pass;
  }
  CHECK(good_probe);
  CHECK(failed_probe);
  // the good probe's row made it into the CSV
  CHECK(slurp("harness_sweep_isolation/dichotomy.csv").find(",Vanishing") != std::string::npos);
}

TEST_CASE("dichotomy sweep over the default mu grid switches exactly once") {
  auto outcome = parse_config(R"(
[experiment]
kind = dichotomy_sweep
[numerics]
N = 200
dt = 0.001
horizon = 30
h0 = 1
g0 = -1
u0_amplitude = 0.5
lstar = 3.141592653589793
[sweep]
parameter = mu
values = logspace(0.01, 10, 9)
)");
  REQUIRE(outcome.ok());
  auto cfg = *outcome.config;
  cfg.output_dir = "harness_dichotomy_grid";
  const auto rep = run_experiment(cfg, 0, true);
  CHECK(rep.aggregate_pass());
  bool monotone_checked = false;
  for (const auto& r : rep.records)
    if (r.name.find("single monotone") != std::string::npos) {
      monotone_checked = true;
      CHECK(r.pass);
    }
  CHECK(monotone_checked);
}

TEST_CASE("lyapunov validation experiment passes end to end") {
  auto outcome = parse_config(R"(
[experiment]
kind = lyapunov_validation
[model]
a = 1 | 0.5:1:0, 0.3:1.4142135623730951:0
b = 1 |
[numerics]
N = 200
dt = 0.005
horizon = 40
)");
  REQUIRE(outcome.ok());
  auto cfg = *outcome.config;
  cfg.output_dir = "harness_lyap";
  const auto rep = run_experiment(cfg, 2, true);
  CHECK(rep.aggregate_pass());
  const std::string report = slurp("harness_lyap/report.txt");
  CHECK(report.find("PASS") != std::string::npos);
  CHECK(report.rfind("FAIL") == report.find("FAIL"));  // no FAIL records
}
