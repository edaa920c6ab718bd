#include "fbkpp/config.hpp"

#include "fbkpp/csv.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace fbkpp::harness {

namespace {

const std::map<std::string, ExperimentKind> kKindNames = {
    {"lyapunov_validation", ExperimentKind::LyapunovValidation},
    {"ode_oracle", ExperimentKind::OdeOracle},
    {"semiwave", ExperimentKind::Semiwave},
    {"fb_single", ExperimentKind::FbSingle},
    {"fb_double", ExperimentKind::FbDouble},
    {"speed_consistency", ExperimentKind::SpeedConsistency},
    {"dichotomy_sweep", ExperimentKind::DichotomySweep},
    {"convergence_study", ExperimentKind::ConvergenceStudy},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == trim(text).size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_long(const std::string& text, long& out) {
  try {
    std::size_t used = 0;
    out = std::stol(text, &used);
    return used == trim(text).size();
  } catch (const std::exception&) {
    return false;
  }
}

// "0.5, 1, 2" or "logspace(0.01, 10, 9)"
bool parse_values(const std::string& text, std::vector<double>& out) {
  out.clear();
  const std::string t = trim(text);
  if (t.rfind("logspace(", 0) == 0 && t.back() == ')') {
    const std::string inner = t.substr(9, t.size() - 10);
    std::stringstream ss(inner);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) return false;
    double lo, hi;
    long n;
    if (!parse_double(trim(a), lo) || !parse_double(trim(b), hi) || !parse_long(trim(c), n)) return false;
    if (!(lo > 0 && hi > lo && n >= 2)) return false;
    for (long i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / double(n - 1)));
    return true;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double(trim(item), v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kKindNames)
    if (k == kind) return name;
  return "?";
}

std::optional<ExperimentKind> kind_from_string(const std::string& name) {
  const auto it = kKindNames.find(name);
  if (it == kKindNames.end()) return std::nullopt;
  return it->second;
}

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome out;
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  bool kind_set = false;

  const auto err = [&](int ln, const std::string& msg) { out.errors.push_back({ln, msg}); };

  while (std::getline(stream, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') {
        err(line, "unterminated section header");
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known = {"experiment", "model", "numerics", "sweep", "output"};
      if (!known.count(section)) err(line, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      err(line, "expected key = value");
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    if (seen.count(full)) {
      err(line, "duplicate key '" + full + "' (re-assignment is rejected)");
      continue;
    }
    seen.insert(full);

    const auto numeric = [&](double lo, double hi, double& field, bool allow_sentinel = false) {
      double v;
      if (!parse_double(value, v)) {
        err(line, "cannot parse number for '" + full + "'");
        return;
      }
      if (allow_sentinel && v == -1.0) {
        field = v;
        return;
      }
      if (!(v >= lo && v <= hi)) {
        err(line, "'" + full + "' out of range [" + csv_num(lo) + ", " + csv_num(hi) + "]");
        return;
      }
      field = v;
    };

    if (full == "experiment.kind") {
      const auto k = kind_from_string(value);
      if (!k)
        err(line, "unknown experiment kind '" + value + "'");
      else {
        cfg.kind = *k;
        kind_set = true;
      }
    } else if (full == "model.a" || full == "model.b") {
      try {
        (full == "model.a" ? cfg.a : cfg.b) = trig_poly_from_text(value);
      } catch (const std::exception& e) {
        err(line, std::string("bad trig polynomial: ") + e.what());
      }
    } else if (full == "numerics.mu") {
      numeric(1e-12, 1e6, cfg.mu);
    } else if (full == "numerics.N") {
      long n;
      if (!parse_long(value, n) || n < 16 || n > 1000000)
        err(line, "'numerics.N' must be an integer in [16, 1e6]");
      else
        cfg.N = int(n);
    } else if (full == "numerics.dt") {
      numeric(1e-9, 1.0, cfg.dt);
    } else if (full == "numerics.X") {
      numeric(1e-6, 1e6, cfg.X);
    } else if (full == "numerics.h0") {
      numeric(1e-6, 1e6, cfg.h0);
    } else if (full == "numerics.g0") {
      double v;
      if (!parse_double(value, v))
        err(line, "cannot parse number for 'numerics.g0'");
      else
        cfg.g0 = v;
    } else if (full == "numerics.horizon") {
      numeric(1e-6, 1e7, cfg.horizon);
    } else if (full == "numerics.spinup") {
      numeric(1e-6, 1e7, cfg.spinup, true);
    } else if (full == "numerics.u0_amplitude") {
      numeric(1e-9, 1e6, cfg.u0_amplitude);
    } else if (full == "numerics.snapshot_stride") {
      long n;
      if (!parse_long(value, n) || n < 0)
        err(line, "'numerics.snapshot_stride' must be a nonnegative integer");
      else
        cfg.snapshot_stride = n;
    } else if (full == "numerics.window_fraction") {
      numeric(1e-3, 1.0, cfg.window_fraction);
    } else if (full == "numerics.attraction_tol") {
      numeric(1e-12, 0.1, cfg.attraction_tol);
    } else if (full == "numerics.vanish_tol") {
      numeric(1e-12, 0.1, cfg.vanish_tol);
    } else if (full == "numerics.spread_tol") {
      numeric(1e-12, 1e3, cfg.spread_tol, true);
    } else if (full == "numerics.plateau_tol") {
      numeric(1e-12, 0.1, cfg.plateau_tol);
    } else if (full == "numerics.lstar") {
      numeric(1e-6, 1e3, cfg.lstar, true);
    } else if (full == "numerics.levels") {
      long n;
      if (!parse_long(value, n) || n < 3 || n > 8)
        err(line, "'numerics.levels' must be an integer in [3, 8]");
      else
        cfg.levels = int(n);
    } else if (full == "sweep.parameter") {
      if (value != "mu")
        err(line, "only 'mu' sweeps are supported");
      else
        cfg.sweep.parameter = value;
    } else if (full == "sweep.values") {
      if (!parse_values(value, cfg.sweep.values)) err(line, "cannot parse sweep values");
    } else if (full == "output.dir") {
      if (value.empty())
        err(line, "'output.dir' must not be empty");
      else
        cfg.output_dir = value;
    } else {
      err(line, "unknown key '" + full + "'");
    }
  }

  if (!kind_set) err(0, "missing required key 'experiment.kind'");
  if (!(cfg.g0 < cfg.h0)) err(0, "need g0 < h0");
  if (!(cfg.dt < cfg.horizon)) err(0, "need dt < horizon");
  if (!cfg.sweep.values.empty() && cfg.sweep.parameter.empty()) err(0, "sweep.values given without sweep.parameter");
  if (!check_hypotheses(Reaction{cfg.a, cfg.b}).ok())
    err(0, "model violates the standing hypotheses (positive mean growth, positive limitation)");

  if (out.errors.empty()) out.config = cfg;
  return out;
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "kind = " << to_string(cfg.kind) << "\n\n";
  os << "[model]\n";
  os << "a = " << to_text(cfg.a) << "\n";
  os << "b = " << to_text(cfg.b) << "\n\n";
  os << "[numerics]\n";
  os << "mu = " << csv_num(cfg.mu) << "\n";
  os << "N = " << cfg.N << "\n";
  os << "dt = " << csv_num(cfg.dt) << "\n";
  os << "X = " << csv_num(cfg.X) << "\n";
  os << "h0 = " << csv_num(cfg.h0) << "\n";
  os << "g0 = " << csv_num(cfg.g0) << "\n";
  os << "horizon = " << csv_num(cfg.horizon) << "\n";
  os << "spinup = " << csv_num(cfg.spinup) << "\n";
  os << "u0_amplitude = " << csv_num(cfg.u0_amplitude) << "\n";
  os << "snapshot_stride = " << cfg.snapshot_stride << "\n";
  os << "window_fraction = " << csv_num(cfg.window_fraction) << "\n";
  os << "attraction_tol = " << csv_num(cfg.attraction_tol) << "\n";
  os << "vanish_tol = " << csv_num(cfg.vanish_tol) << "\n";
  os << "spread_tol = " << csv_num(cfg.spread_tol) << "\n";
  os << "plateau_tol = " << csv_num(cfg.plateau_tol) << "\n";
  os << "lstar = " << csv_num(cfg.lstar) << "\n";
  os << "levels = " << cfg.levels << "\n\n";
  if (!cfg.sweep.values.empty()) {
    os << "[sweep]\n";
    os << "parameter = " << cfg.sweep.parameter << "\n";
    os << "values = ";
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i)
      os << (i ? ", " : "") << csv_num(cfg.sweep.values[i]);
    os << "\n\n";
  }
  os << "[output]\n";
  os << "dir = " << cfg.output_dir << "\n";
  return os.str();
}

}  // namespace fbkpp::harness
