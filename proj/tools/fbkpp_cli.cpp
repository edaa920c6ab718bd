// Command line front end: run configured experiments, validate configs, or
// execute the built-in validation suites.  Exit code 0 iff everything the
// invocation ran passed.

#include "fbkpp/config.hpp"
#include "fbkpp/experiments.hpp"
#include "fbkpp/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_errors(const fbkpp::harness::ParseOutcome& outcome) {
  for (const auto& e : outcome.errors) {
    if (e.line > 0)
      std::fprintf(stderr, "config error (line %d): %s\n", e.line, e.message.c_str());
    else
      std::fprintf(stderr, "config error: %s\n", e.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-boundary KPP simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite_name;
  int workers = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "override output directory");
  run->add_option("--workers", workers, "worker pool size (0: auto)");
  run->add_flag("--quiet", quiet, "suppress per-record output");

  auto* validate = app.add_subcommand("validate", "parse and validate a config, print the echo");
  validate->add_option("config", config_path, "config file")->required();

  auto* suite = app.add_subcommand("suite", "run a built-in validation suite (or 'all')");
  suite->add_option("name", suite_name, "suite name or 'all'")->required();
  suite->add_option("--out", out_dir, "output directory (default 'out')");
  suite->add_option("--workers", workers, "worker pool size (0: auto)");
  suite->add_flag("--quiet", quiet, "suppress per-check output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || validate->parsed()) {
      const auto outcome = fbkpp::harness::parse_config(slurp(config_path));
      if (!outcome.ok()) {
        print_errors(outcome);
        return 1;
      }
      if (validate->parsed()) {
        std::fputs(fbkpp::harness::emit_config(*outcome.config).c_str(), stdout);
        return 0;
      }
      auto cfg = *outcome.config;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto report = fbkpp::harness::run_experiment(cfg, workers, quiet);
      if (!quiet) std::printf("report written to %s/report.txt\n", cfg.output_dir.c_str());
      return report.aggregate_pass() ? 0 : 1;
    }

    fbkpp::harness::SuiteContext ctx;
    ctx.out_dir = out_dir.empty() ? "out" : out_dir;
    ctx.workers = workers;
    ctx.quiet = quiet;

    std::vector<fbkpp::harness::SuiteResult> results;
    if (suite_name == "all") {
      results = fbkpp::harness::run_all_suites(ctx);
    } else {
      results.push_back(fbkpp::harness::run_suite(suite_name, ctx));
    }

    bool all_pass = true;
    for (const auto& r : results) {
      all_pass = all_pass && r.pass();
      if (!quiet)
        for (const auto& c : r.checks)
          std::printf("  [%s] %s: %s%s%s\n", r.name.c_str(), c.pass ? "pass" : "FAIL", c.label.c_str(),
                      c.detail.empty() ? "" : " -- ", c.detail.c_str());
      std::printf("%-32s %s\n", r.name.c_str(), r.pass() ? "PASS" : "FAIL");
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
