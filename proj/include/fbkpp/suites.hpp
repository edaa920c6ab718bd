#pragma once

#include <string>
#include <vector>

namespace fbkpp::harness {

struct SuiteCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::vector<SuiteCheck> checks;
  double seconds = 0;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

struct SuiteContext {
  std::string out_dir = "out";
  int workers = 0;
  bool quiet = true;
};

/// Names of the built-in validation suites, in fixed execution order.
/// "determinism" is realized by the `run_all_suites` driver (a full second
/// pass compared byte for byte) and by `run_suite("determinism", ...)`.
std::vector<std::string> suite_names();

SuiteResult run_suite(const std::string& name, const SuiteContext& ctx);

/// Runs every suite into ctx.out_dir, then repeats the full set into
/// ctx.out_dir/determinism_recheck and byte-compares all CSV outputs.
std::vector<SuiteResult> run_all_suites(const SuiteContext& ctx);

}  // namespace fbkpp::harness
