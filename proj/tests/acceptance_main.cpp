// Acceptance runner: executes every built-in validation suite and prints
// one pass/fail line per criterion.  Exit code 0 iff all criteria pass.

#include "fbkpp/suites.hpp"

#include <cstdio>

int main() {
  fbkpp::harness::SuiteContext ctx;
  ctx.out_dir = "acceptance_out";
  ctx.workers = 0;
  ctx.quiet = true;

  const auto results = fbkpp::harness::run_all_suites(ctx);

  bool all = true;
  int idx = 0;
  for (const auto& r : results) {
    ++idx;
    const bool pass = r.pass();
    all = all && pass;
    std::printf("criterion %2d %-32s %s  (%.1f s)\n", idx, r.name.c_str(), pass ? "PASS" : "FAIL", r.seconds);
    if (!pass)
      for (const auto& c : r.checks)
        if (!c.pass) std::printf("    failed: %s%s%s\n", c.label.c_str(), c.detail.empty() ? "" : " -- ", c.detail.c_str());
  }
  std::printf("%s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
