#pragma once

#include "fbkpp/config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fbkpp::harness {

struct RunRecord {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct RunReport {
  std::string experiment;
  std::string config_echo;
  std::vector<RunRecord> records;

  bool aggregate_pass() const {
    for (const auto& r : records)
      if (!r.pass) return false;
    return !records.empty();
  }
  std::string to_text() const;
};

/// Run fn(0..n-1) on a bounded pool; exceptions are rethrown per index by
/// the caller via the returned flags.  Results must be written into
/// preallocated slots so output order never depends on scheduling.
void parallel_indexed(int n, int workers, const std::function<void(int)>& fn);

int resolve_workers(int workers);

/// Execute the configured experiment, writing CSVs (and a report.txt with a
/// final PASS/FAIL line) under cfg.output_dir.  A failed probe inside a
/// sweep becomes a failed record; it never aborts the other probes.
RunReport run_experiment(const ExperimentConfig& cfg, int workers = 0, bool quiet = true);

/// Refinement study at (N, dt), (2N, dt/2), ... for the configured levels;
/// reports observed orders for the exponent, the spreading speed and the
/// front position, plus the conservation-residual halving pair.
RunReport convergence_study(ExperimentConfig cfg, int workers = 0, bool quiet = true);

}  // namespace fbkpp::harness
