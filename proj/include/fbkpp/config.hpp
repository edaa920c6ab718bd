#pragma once

#include "fbkpp/forcing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbkpp::harness {

enum class ExperimentKind {
  LyapunovValidation,
  OdeOracle,
  Semiwave,
  FbSingle,
  FbDouble,
  SpeedConsistency,
  DichotomySweep,
  ConvergenceStudy,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_string(const std::string& name);

struct SweepSpec {
  std::string parameter;        // currently only "mu"
  std::vector<double> values;   // explicit list or logspace(lo, hi, n)
  bool empty() const { return values.empty(); }
};

/// One flat configuration for every experiment kind.  Negative sentinel
/// values mean "derive the default at run time" and are documented per
/// field below.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Semiwave;
  TrigPoly a = TrigPoly(1.0);
  TrigPoly b = TrigPoly(1.0);
  double mu = 1.0;
  int N = 400;
  double dt = 1e-3;
  double X = 30.0;              // half-line truncation
  double h0 = 1.8;
  double g0 = -1.0;             // double-front left start (may be negative)
  double horizon = 40.0;
  double spinup = -1.0;         // -1: 100 / mean(a)
  double u0_amplitude = 0.8;
  long snapshot_stride = 0;     // 0: about 32 snapshots per run
  double window_fraction = 0.4;
  double attraction_tol = 1e-5;
  double vanish_tol = 1e-4;
  double spread_tol = -1.0;     // -1: 0.1 * min V*
  double plateau_tol = 1e-5;
  double lstar = -1.0;          // -1: computed from the linearization
  int levels = 3;               // refinement levels for convergence studies
  SweepSpec sweep;
  std::string output_dir = "out";
};

struct ConfigError {
  int line = 0;  // 0: cross-field validation
  std::string message;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value() && errors.empty(); }
};

/// Parse line-oriented `key = value` text with `[section]` headers.
/// Unknown keys, duplicate keys and out-of-range values are errors with
/// line numbers; on any error no config is returned.
ParseOutcome parse_config(const std::string& text);

/// Canonical text with every key present; parse(emit(parse(x))) == parse(x).
std::string emit_config(const ExperimentConfig& cfg);

}  // namespace fbkpp::harness
