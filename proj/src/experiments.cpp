#include "fbkpp/experiments.hpp"

#include "fbkpp/csv.hpp"
#include "fbkpp/freeboundary.hpp"
#include "fbkpp/kinetics.hpp"
#include "fbkpp/semiwave.hpp"
#include "fbkpp/spectral.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fbkpp::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Timer {
  double t0 = now_seconds();
  double elapsed() const { return now_seconds() - t0; }
};

Reaction model_of(const ExperimentConfig& cfg) { return Reaction{cfg.a, cfg.b}; }

std::function<double(double)> single_hump(double amp, double h0) {
  return [amp, h0](double x) { return amp * std::cos(kPi * x / (2.0 * h0)); };
}
std::function<double(double)> double_arch(double amp, double g0, double h0) {
  return [amp, g0, h0](double x) { return amp * std::sin(kPi * (x - g0) / (h0 - g0)); };
}

FrontParams<double> front_params(const ExperimentConfig& cfg) {
  FrontParams<double> p;
  p.N = cfg.N;
  p.dt = cfg.dt;
  p.horizon = cfg.horizon;
  p.snapshot_stride = cfg.snapshot_stride;
  return p;
}

SemiWaveParams<double> semiwave_params(const ExperimentConfig& cfg) {
  SemiWaveParams<double> p;
  p.X = cfg.X;
  p.N = cfg.N;
  p.dt = cfg.dt;
  p.horizon = cfg.horizon;
  p.spinup = cfg.spinup;
  p.attraction_tol = cfg.attraction_tol;
  return p;
}

ClassifyOptions<double> classify_options(const ExperimentConfig& cfg) {
  ClassifyOptions<double> o;
  o.vanish_tol = cfg.vanish_tol;
  o.plateau_tol = cfg.plateau_tol;
  o.spread_tol = cfg.spread_tol;
  return o;
}

double resolve_lstar(const ExperimentConfig& cfg, CriticalKind kind) {
  if (cfg.lstar > 0) return cfg.lstar;
  const LinearCoefficient<double> c{cfg.a};
  const double guess = kPi / std::sqrt(ap_mean(cfg.a)) / (kind == CriticalKind::NeumannDirichlet ? 2.0 : 1.0);
  return critical_length(c, kind, 0.0, {guess / 4.0, guess * 4.0}, 200, 50.0).l;
}

void write_trajectory_csv(const fs::path& dir, const FrontTrajectory<double>& traj) {
  CsvWriter w(dir / "trajectory.csv", {"t", "h", "g", "h_dot", "mass", "u_sup", "u_at_0"});
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    w.write_row({csv_num(traj.t[i]), csv_num(traj.h[i]), csv_num(traj.g[i]), csv_num(traj.h_dot[i]),
                 csv_num(traj.mass[i]), csv_num(traj.u_sup[i]), csv_num(traj.u_at_0[i])});
}

void write_profiles_csv(const fs::path& dir, const FrontTrajectory<double>& traj) {
  CsvWriter w(dir / "profiles.csv", {"t", "x", "u"});
  for (const auto& s : traj.snapshots) {
    const Eigen::Index n = s.v.size() - 1;
    for (Eigen::Index i = 0; i <= n; ++i) {
      const double xi = traj.mode == FrontMode::Single ? double(i) / double(n) : -1.0 + 2.0 * double(i) / double(n);
      const double x = traj.mode == FrontMode::Single ? xi * s.h : (s.h + s.g) / 2.0 + xi * (s.h - s.g) / 2.0;
      w.write_row({csv_num(s.t), csv_num(x), csv_num(s.v[i])});
    }
  }
}

void write_classification_jsonl(const fs::path& dir, const ExperimentConfig& cfg, double mu,
                                const ClassificationOutcome<double>& outcome) {
  std::ofstream out(dir / "classification.jsonl", std::ios::binary | std::ios::app);
  json j;
  j["verdict"] = to_string(outcome.verdict);
  j["evidence"] = {{"lstar", outcome.lstar},
                   {"width_final", outcome.width_final},
                   {"h_final", outcome.h_final},
                   {"u_sup_final", outcome.u_sup_final},
                   {"front_rate_final", outcome.front_rate_final},
                   {"window_depth", outcome.window_depth},
                   {"vanish_tol", outcome.vanish_tol},
                   {"spread_tol", outcome.spread_tol},
                   {"plateau_tol", outcome.plateau_tol},
                   {"slack_binding", outcome.slack_binding}};
  j["parameters"] = {{"mu", mu},         {"N", cfg.N},   {"dt", cfg.dt},
                     {"horizon", cfg.horizon}, {"h0", cfg.h0}, {"g0", cfg.g0},
                     {"a", to_text(cfg.a)},    {"b", to_text(cfg.b)}};
  out << j.dump() << "\n";
}

// ---- per-kind experiments ----

void run_lyapunov_validation(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir) {
  struct Case {
    std::string kind;
    TrigPoly a;
    double gamma, l;
  };
  const std::vector<Case> cases = {
      {"neumann_dirichlet", TrigPoly(0.0), 0.0, 2.0},    {"neumann_dirichlet", TrigPoly(1.0), 0.0, 2.0},
      {"neumann_dirichlet", cfg.a, 0.0, 2.0},            {"dirichlet_drift", TrigPoly(0.0), 1.0, kPi},
      {"dirichlet_drift", TrigPoly(0.0), 0.0, kPi},      {"dirichlet_drift", cfg.a, 0.0, kPi},
  };
  CsvWriter w(dir / "lyapunov.csv", {"kind", "l", "gamma", "a_mean", "lambda", "converged", "horizon", "N",
                                     "expected", "error"});
  for (const auto& c : cases) {
    Timer t;
    const double dt = std::min(cfg.dt, c.l / cfg.N);
    const LinearCoefficient<double> lc{c.a};
    const auto est = c.kind == "neumann_dirichlet" ? lyapunov_nd(lc, c.l, cfg.N, cfg.horizon, dt)
                                                   : lyapunov_dd_drift(lc, c.gamma, c.l, cfg.N, cfg.horizon, dt);
    const double expected = c.kind == "neumann_dirichlet"
                                ? ap_mean(c.a) - kPi * kPi / (4.0 * c.l * c.l)
                                : ap_mean(c.a) - (c.gamma * c.gamma / 4.0 + kPi * kPi / (c.l * c.l));
    const double err = std::abs(est.value - expected);
    const bool pass = est.converged && err < 1e-3 * std::max(1.0, std::abs(expected));
    w.write_row({c.kind, csv_num(c.l), csv_num(c.gamma), csv_num(ap_mean(c.a)), csv_num(est.value),
                 est.converged ? "1" : "0", csv_num(est.horizon), std::to_string(cfg.N), csv_num(expected),
                 csv_num(err)});
    rep.records.push_back({c.kind + " l=" + csv_num(c.l) + " gamma=" + csv_num(c.gamma), pass,
                           "lambda=" + csv_num(est.value) + " expected=" + csv_num(expected), t.elapsed()});
  }
}

void run_ode_oracle(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir) {
  Timer t;
  const auto m = model_of(cfg);
  const auto v = ap_positive_solution(m, cfg.spinup, cfg.horizon, cfg.dt);
  CsvWriter w(dir / "ode_oracle.csv", {"t", "v_star", "oracle", "truncation_bound", "diff"});
  double sup = 0;
  const Eigen::Index stride = std::max<Eigen::Index>(1, v.size() / 500);
  for (Eigen::Index i = 0; i < v.size(); i += stride) {
    const auto o = logistic_oracle(m, v.time(i));
    const double d = std::abs(v.values[i] - o.value);
    sup = std::max(sup, d);
    w.write_row({csv_num(v.time(i)), csv_num(v.values[i]), csv_num(o.value), csv_num(o.truncation_bound), csv_num(d)});
  }
  rep.records.push_back({"attracting state vs quadrature oracle", sup < 1e-6, "sup_diff=" + csv_num(sup), t.elapsed()});
}

void run_semiwave(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir) {
  Timer t;
  const auto m = model_of(cfg);
  const auto r = semiwave_evolve(m, cfg.mu, semiwave_params(cfg));
  {
    CsvWriter w(dir / "flux_history.csv", {"t", "flux0", "mu_times_flux0"});
    for (Eigen::Index i = 0; i < r.flux_times.size(); ++i)
      w.write_row({csv_num(r.flux_times[i]), csv_num(r.flux_values[i]), csv_num(cfg.mu * r.flux_values[i])});
  }
  {
    CsvWriter w(dir / "profile_window.csv", {"t", "x", "u"});
    for (const auto& s : r.profile_window)
      for (int i = 0; i <= s.N; ++i) w.write_row({csv_num(s.t), csv_num(s.X * i / s.N), csv_num(s.values[i])});
  }
  {
    CsvWriter w(dir / "summary.csv",
                {"cstar", "attraction_gap", "window_begin", "window_end", "negative_clips"});
    w.write_row({csv_num(r.cstar), csv_num(r.attraction_gap), csv_num(r.window_begin), csv_num(r.window_end),
                 std::to_string(r.negative_clips)});
  }
  rep.records.push_back(
      {"semiwave evolve", true, "cstar=" + csv_num(r.cstar) + " gap=" + csv_num(r.attraction_gap), t.elapsed()});

  double far = 0;
  for (std::size_t j = 0; j < r.profile_window.size(); ++j)
    far = std::max(far, std::abs(r.profile_window[j].values[cfg.N / 2] - r.window_vstar[j]));
  rep.records.push_back({"mid-domain matches the kinetic state", far < 1e-2, "max|u(X/2)-V*|=" + csv_num(far), 0.0});
}

void run_fb(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir, FrontMode mode) {
  Timer t;
  const auto m = model_of(cfg);
  const FrontTrajectory<double> traj =
      mode == FrontMode::Single
          ? fb_evolve_single(m, cfg.mu, single_hump(cfg.u0_amplitude, cfg.h0), cfg.h0, front_params(cfg))
          : fb_evolve_double(m, cfg.mu, double_arch(cfg.u0_amplitude, cfg.g0, cfg.h0), cfg.g0, cfg.h0,
                             front_params(cfg));
  write_trajectory_csv(dir, traj);
  write_profiles_csv(dir, traj);

  const double lstar =
      resolve_lstar(cfg, mode == FrontMode::Single ? CriticalKind::NeumannDirichlet : CriticalKind::DirichletDrift);
  const double min_vstar = ap_positive_solution(m, cfg.spinup, 20.0, 1e-3).values.minCoeff();
  const auto outcome = classify(traj, lstar, min_vstar, classify_options(cfg));
  write_classification_jsonl(dir, cfg, cfg.mu, outcome);
  rep.records.push_back({"evolve + classify", outcome.verdict != Verdict::Undetermined,
                         "verdict=" + to_string(outcome.verdict) + " h_final=" + csv_num(traj.h.back()),
                         t.elapsed()});
  if (outcome.verdict == Verdict::Spreading) {
    const auto est = front_speed(traj, outcome, cfg.window_fraction);
    rep.records.push_back({"front speed", true,
                           "slope=" + csv_num(est.value) + " residual=" + csv_num(est.rms_residual) +
                               " h(T)/T=" + csv_num(est.endpoint_ratio),
                           0.0});
  }
  const auto res = mass_balance_residual(traj);
  rep.records.push_back({"mass balance residual", true, "sup(t>=0.5)=" + csv_num(res.sup_norm(0.5)), 0.0});
}

void run_speed_consistency(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir, int workers) {
  const auto m = model_of(cfg);
  std::vector<double> mus = cfg.sweep.values;
  if (mus.empty()) mus = {0.5, 1.0, 2.0, 5.0};
  const bool autonomous = cfg.a.mode_count() == 0 && cfg.b.mode_count() == 0;
  const double lstar = resolve_lstar(cfg, CriticalKind::NeumannDirichlet);
  const double min_vstar = ap_positive_solution(m, cfg.spinup, 20.0, 1e-3).values.minCoeff();

  struct Probe {
    double mu = 0, c_front = 0, c_semi = 0, c_shoot = 0;
    bool ok = false;
    std::string error;
    double seconds = 0;
  };
  std::vector<Probe> probes(mus.size());

  parallel_indexed(int(mus.size()), workers, [&](int i) {
    Timer t;
    Probe& p = probes[std::size_t(i)];
    p.mu = mus[std::size_t(i)];
    try {
      p.c_semi = semiwave_evolve(m, p.mu, semiwave_params(cfg)).cstar;
      ExperimentConfig fb = cfg;
      fb.dt = std::min(cfg.dt, 5e-4);
      fb.N = std::max(cfg.N, 1200);
      const auto traj = fb_evolve_single(m, p.mu, single_hump(cfg.u0_amplitude, cfg.h0), cfg.h0, front_params(fb));
      const auto outcome = classify(traj, lstar, min_vstar, classify_options(cfg));
      p.c_front = front_speed(traj, outcome, cfg.window_fraction).value;
      if (autonomous) p.c_shoot = shoot_autonomous(ap_mean(cfg.a), ap_mean(cfg.b), p.mu).c;
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    p.seconds = t.elapsed();
  });

  CsvWriter w(dir / "speeds.csv",
              {"mu", "c_front", "c_semiwave", "c_shoot", "rel_front_semi", "rel_semi_shoot"});
  double prev_semi = 0;
  bool monotone = true;
  for (const auto& p : probes) {
    if (!p.ok) {
      rep.records.push_back({"mu=" + csv_num(p.mu), false, p.error, p.seconds});
      continue;
    }
    const double rel_fs = std::abs(p.c_front - p.c_semi) / p.c_semi;
    const double rel_ss = autonomous ? std::abs(p.c_semi - p.c_shoot) / p.c_shoot : 0.0;
    w.write_row({csv_num(p.mu), csv_num(p.c_front), csv_num(p.c_semi), csv_num(p.c_shoot), csv_num(rel_fs),
                 csv_num(rel_ss)});
    const double kpp_bound = 2.0 * std::sqrt(cfg.a.upper_bound());
    const bool pass = rel_fs < 0.02 && (!autonomous || rel_ss < 0.02) && p.c_semi < kpp_bound;
    rep.records.push_back({"mu=" + csv_num(p.mu), pass,
                           "c_front=" + csv_num(p.c_front) + " c_semi=" + csv_num(p.c_semi) +
                               (autonomous ? " c_shoot=" + csv_num(p.c_shoot) : ""),
                           p.seconds});
    monotone = monotone && p.c_semi > prev_semi;
    prev_semi = p.c_semi;
  }
  rep.records.push_back({"speeds strictly increasing in mu", monotone, "", 0.0});
}

void run_dichotomy_sweep(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir, int workers) {
  const auto m = model_of(cfg);
  std::vector<double> mus = cfg.sweep.values;
  if (mus.empty())
    for (int i = 0; i < 9; ++i) mus.push_back(0.01 * std::pow(1000.0, i / 8.0));

  const double lstar = resolve_lstar(cfg, CriticalKind::DirichletDrift);
  const double min_vstar = ap_positive_solution(m, cfg.spinup, 20.0, 1e-3).values.minCoeff();

  struct Probe {
    double mu = 0, h_final = 0, g_final = 0, u_sup = 0, horizon_used = 0;
    Verdict verdict = Verdict::Undetermined;
    bool ok = false;
    std::string error;
  };
  std::vector<Probe> probes(mus.size());

  parallel_indexed(int(mus.size()), workers, [&](int i) {
    Probe& p = probes[std::size_t(i)];
    p.mu = mus[std::size_t(i)];
    try {
      FrontParams<double> fp = front_params(cfg);
      for (int ext = 0;; ++ext) {
        const auto traj =
            fb_evolve_double(m, p.mu, double_arch(cfg.u0_amplitude, cfg.g0, cfg.h0), cfg.g0, cfg.h0, fp);
        const auto outcome = classify(traj, lstar, min_vstar, classify_options(cfg));
        p.verdict = outcome.verdict;
        p.h_final = traj.h.back();
        p.g_final = traj.g.back();
        p.u_sup = traj.u_sup.back();
        p.horizon_used = fp.horizon;
        if (outcome.verdict != Verdict::Undetermined || (1 << (ext + 1)) > 8) break;
        fp.horizon *= 2;
      }
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });

  CsvWriter w(dir / "dichotomy.csv", {"mu", "verdict", "h_final", "g_final", "width_final", "u_sup_final",
                                      "horizon_used"});
  int switches = 0;
  bool last_was_spreading = false, all_determined = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    if (!p.ok) {
      rep.records.push_back({"mu=" + csv_num(p.mu), false, p.error, 0.0});
      all_determined = false;
      continue;
    }
    w.write_row({csv_num(p.mu), to_string(p.verdict), csv_num(p.h_final), csv_num(p.g_final),
                 csv_num(p.h_final - p.g_final), csv_num(p.u_sup), csv_num(p.horizon_used)});
    rep.records.push_back({"mu=" + csv_num(p.mu), p.verdict != Verdict::Undetermined,
                           "verdict=" + to_string(p.verdict), 0.0});
    all_determined = all_determined && p.verdict != Verdict::Undetermined;
    const bool spreading = p.verdict == Verdict::Spreading;
    if (i > 0 && spreading != last_was_spreading) ++switches;
    last_was_spreading = spreading;
  }
  const bool monotone = all_determined && switches == 1 && probes.front().verdict == Verdict::Vanishing &&
                        probes.back().verdict == Verdict::Spreading;
  rep.records.push_back({"single monotone vanishing->spreading switch", monotone,
                         "switches=" + std::to_string(switches), 0.0});
}

double richardson_order(double v0, double v1, double v2) {
  return std::log2(std::abs(v0 - v1) / std::abs(v1 - v2));
}

void run_convergence_study(const ExperimentConfig& cfg, RunReport& rep, const fs::path& dir, int workers) {
  const auto m = model_of(cfg);
  const int levels = cfg.levels;

  struct Level {
    int N;
    double dt;
    double lambda = 0, cstar = 0, front = 0;
    std::string error;
    bool ok = false;
  };
  std::vector<Level> L(levels);
  for (int j = 0; j < levels; ++j) L[std::size_t(j)] = {cfg.N << j, cfg.dt / (1 << j)};

  parallel_indexed(levels, workers, [&](int j) {
    Level& lv = L[std::size_t(j)];
    try {
      const LinearCoefficient<double> lc{cfg.a};
      lv.lambda = lyapunov_nd(lc, 2.0, lv.N, cfg.horizon, std::min(lv.dt, 2.0 / lv.N)).value;
      ExperimentConfig c = cfg;
      c.N = lv.N;
      c.dt = lv.dt;
      lv.cstar = semiwave_evolve(m, cfg.mu, semiwave_params(c)).cstar;
      FrontParams<double> fp = front_params(c);
      fp.horizon = std::min(cfg.horizon, 10.0);
      const auto traj = fb_evolve_single(m, cfg.mu, single_hump(cfg.u0_amplitude, cfg.h0), cfg.h0, fp);
      lv.front = traj.h.back();
      lv.ok = true;
    } catch (const std::exception& e) {
      lv.error = e.what();
    }
  });

  CsvWriter w(dir / "convergence.csv", {"quantity", "level", "N", "dt", "value"});
  for (int j = 0; j < levels; ++j) {
    const auto& lv = L[std::size_t(j)];
    if (!lv.ok) {
      rep.records.push_back({"level " + std::to_string(j), false, lv.error, 0.0});
      return;
    }
    w.write_row({"lambda", std::to_string(j), std::to_string(lv.N), csv_num(lv.dt), csv_num(lv.lambda)});
    w.write_row({"cstar", std::to_string(j), std::to_string(lv.N), csv_num(lv.dt), csv_num(lv.cstar)});
    w.write_row({"front_position", std::to_string(j), std::to_string(lv.N), csv_num(lv.dt), csv_num(lv.front)});
  }

  const auto gate = [&](const std::string& name, double v0, double v1, double v2, double min_order) {
    const double p = richardson_order(v0, v1, v2);
    rep.records.push_back({name + " observed order", p >= min_order, "p=" + csv_num(p), 0.0});
  };
  gate("lambda", L[0].lambda, L[1].lambda, L[2].lambda, 1.5);
  gate("cstar", L[0].cstar, L[1].cstar, L[2].cstar, 0.8);
  gate("front_position", L[0].front, L[1].front, L[2].front, 1.5);

  // conservation residual halving on the (N, dt) -> (2N, dt/2) pair
  FrontParams<double> fa = front_params(cfg);
  fa.horizon = std::min(cfg.horizon, 8.0);
  FrontParams<double> fb = fa;
  fb.N *= 2;
  fb.dt /= 2;
  const double r0 =
      mass_balance_residual(fb_evolve_single(m, cfg.mu, single_hump(cfg.u0_amplitude, cfg.h0), cfg.h0, fa))
          .sup_norm(0.5);
  const double r1 =
      mass_balance_residual(fb_evolve_single(m, cfg.mu, single_hump(cfg.u0_amplitude, cfg.h0), cfg.h0, fb))
          .sup_norm(0.5);
  rep.records.push_back({"mass residual halving", r0 / r1 >= 2.0,
                         "sup_coarse=" + csv_num(r0) + " sup_fine=" + csv_num(r1) + " ratio=" + csv_num(r0 / r1),
                         0.0});
}

}  // namespace

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "experiment: " << experiment << "\n\n";
  os << "--- configuration (defaults filled) ---\n" << config_echo << "\n--- records ---\n";
  for (const auto& r : records) {
    os << (r.pass ? "  ok   " : "  FAIL ") << r.name;
    if (!r.detail.empty()) os << "  [" << r.detail << "]";
    if (r.seconds > 0) os << "  (" << csv_num(r.seconds) << " s)";
    os << "\n";
  }
  os << "\n" << (aggregate_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return int(std::min(4u, hc == 0 ? 1u : hc));
}

void parallel_indexed(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::min(resolve_workers(workers), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

RunReport run_experiment(const ExperimentConfig& cfg, int workers, bool quiet) {
  RunReport rep;
  rep.experiment = to_string(cfg.kind);
  rep.config_echo = emit_config(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  try {
    switch (cfg.kind) {
      case ExperimentKind::LyapunovValidation: run_lyapunov_validation(cfg, rep, dir); break;
      case ExperimentKind::OdeOracle: run_ode_oracle(cfg, rep, dir); break;
      case ExperimentKind::Semiwave: run_semiwave(cfg, rep, dir); break;
      case ExperimentKind::FbSingle: run_fb(cfg, rep, dir, FrontMode::Single); break;
      case ExperimentKind::FbDouble: run_fb(cfg, rep, dir, FrontMode::Double); break;
      case ExperimentKind::SpeedConsistency: run_speed_consistency(cfg, rep, dir, workers); break;
      case ExperimentKind::DichotomySweep: run_dichotomy_sweep(cfg, rep, dir, workers); break;
      case ExperimentKind::ConvergenceStudy: run_convergence_study(cfg, rep, dir, workers); break;
    }
  } catch (const std::exception& e) {
    rep.records.push_back({"experiment", false, e.what(), 0.0});
  }

  std::ofstream report(dir / "report.txt", std::ios::binary | std::ios::trunc);
  report << rep.to_text();
  if (!quiet) std::fputs(rep.to_text().c_str(), stdout);
  return rep;
}

RunReport convergence_study(ExperimentConfig cfg, int workers, bool quiet) {
  cfg.kind = ExperimentKind::ConvergenceStudy;
  return run_experiment(cfg, workers, quiet);
}

}  // namespace fbkpp::harness
