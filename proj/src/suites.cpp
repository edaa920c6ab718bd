#include "fbkpp/suites.hpp"

#include "fbkpp/csv.hpp"
#include "fbkpp/experiments.hpp"
#include "fbkpp/freeboundary.hpp"
#include "fbkpp/kinetics.hpp"
#include "fbkpp/semiwave.hpp"
#include "fbkpp/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace fbkpp::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt2 = std::sqrt(2.0);

Reaction fisher() { return Reaction{TrigPoly(1.0), TrigPoly(1.0)}; }
Reaction two_mode_forcing() { return Reaction{TrigPoly(1.0, {{0.5, 1.0, 0.0}, {0.3, kSqrt2, 0.0}}), TrigPoly(1.0)}; }

std::function<double(double)> hump(double amp, double h0) {
  return [amp, h0](double x) { return amp * std::cos(kPi * x / (2.0 * h0)); };
}
std::function<double(double)> arch(double amp, double g0, double h0) {
  return [amp, g0, h0](double x) { return amp * std::sin(kPi * (x - g0) / (h0 - g0)); };
}

void check(SuiteResult& s, const std::string& label, bool pass, const std::string& detail) {
  s.checks.push_back({label, pass, detail});
}

// ---- 1. closed-form exponents ------------------------------------------

SuiteResult suite_lyapunov_closed_forms(const SuiteContext& ctx) {
  SuiteResult s{"lyapunov_closed_forms"};
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "lyapunov.csv",
              {"kind", "l", "gamma", "a_mean", "lambda", "converged", "horizon", "N", "expected", "error"});

  const LinearCoefficient<double> zero{TrigPoly(0.0)};
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto est = lyapunov_nd(zero, 2.0, 400, 50.0, 5e-3);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double expected = -kPi * kPi / 16.0;
    const double rel = std::abs(est.value - expected) / std::abs(expected);
    w.write_row({"neumann_dirichlet", "2", "0", "0", csv_num(est.value), est.converged ? "1" : "0", "50", "400",
                 csv_num(expected), csv_num(rel)});
    check(s, "lambda(0, l=2) = -pi^2/16 within 1e-3 relative", est.converged && rel < 1e-3,
          "lambda=" + csv_num(est.value) + " rel=" + csv_num(rel));
    check(s, "mixed-boundary estimate under 10 s", secs < 10.0, csv_num(secs) + " s");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto est = lyapunov_dd_drift(zero, 1.0, kPi, 400, 50.0, 5e-3);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double expected = -1.25;
    const double err = std::abs(est.value - expected);
    w.write_row({"dirichlet_drift", csv_num(kPi), "1", "0", csv_num(est.value), est.converged ? "1" : "0", "50",
                 "400", csv_num(expected), csv_num(err)});
    check(s, "lambda~(0, gamma=1, l=pi) = -1.25 within 1e-3", est.converged && err < 1e-3,
          "lambda=" + csv_num(est.value) + " err=" + csv_num(err));
    check(s, "drifted estimate under 10 s", secs < 10.0, csv_num(secs) + " s");
  }
  return s;
}

// ---- 2. mean-shift identity --------------------------------------------

SuiteResult suite_lyapunov_mean_shift(const SuiteContext& ctx) {
  SuiteResult s{"lyapunov_mean_shift"};
  const auto t_start = std::chrono::steady_clock::now();
  const LinearCoefficient<double> c{TrigPoly(1.0, {{0.5, 1.0, 0.0}, {0.3, kSqrt2, 0.0}})};
  const auto est = lyapunov_nd(c, 2.0, 400, 200.0, 5e-3);
  const double expected = 1.0 - kPi * kPi / 16.0;
  const double err = std::abs(est.value - expected);
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "lyapunov.csv",
              {"kind", "l", "gamma", "a_mean", "lambda", "converged", "horizon", "N", "expected", "error"});
  w.write_row({"neumann_dirichlet", "2", "0", "1", csv_num(est.value), est.converged ? "1" : "0", "200", "400",
               csv_num(expected), csv_num(err)});
  check(s, "lambda(1 + 0.5 sin t + 0.3 sin sqrt2 t, l=2) = 1 - pi^2/16 within 1e-3", est.converged && err < 1e-3,
        "lambda=" + csv_num(est.value) + " err=" + csv_num(err));
  check(s, "horizon-200 estimate under 30 s",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() < 30.0, "");
  return s;
}

// ---- 3. critical lengths -------------------------------------------------

SuiteResult suite_critical_lengths(const SuiteContext& ctx) {
  SuiteResult s{"critical_lengths"};
  const LinearCoefficient<double> unit{TrigPoly(1.0)};
  const auto lstar = critical_length(unit, CriticalKind::NeumannDirichlet, 0.0, {0.5, 4.0}, 200, 50.0);
  const auto Lstar = critical_length(unit, CriticalKind::DirichletDrift, 0.0, {1.0, 6.0}, 200, 50.0);
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "critical_lengths.csv",
              {"kind", "l", "lambda_at_l", "probes", "expected"});
  w.write_row({"neumann_dirichlet", csv_num(lstar.l), csv_num(lstar.lambda), std::to_string(lstar.probes),
               csv_num(kPi / 2.0)});
  w.write_row({"dirichlet", csv_num(Lstar.l), csv_num(Lstar.lambda), std::to_string(Lstar.probes), csv_num(kPi)});
  check(s, "l*(mean 1) = pi/2 within 1e-3", std::abs(lstar.l - kPi / 2.0) < 1e-3 && lstar.probes <= 30,
        "l*=" + csv_num(lstar.l) + " probes=" + std::to_string(lstar.probes));
  check(s, "L*(mean 1) = pi within 1e-3", std::abs(Lstar.l - kPi) < 1e-3 && Lstar.probes <= 30,
        "L*=" + csv_num(Lstar.l) + " probes=" + std::to_string(Lstar.probes));
  check(s, "L* >= l*", Lstar.l >= lstar.l, "");
  return s;
}

// ---- 4. kinetic oracle equivalence ---------------------------------------

SuiteResult suite_ode_oracle(const SuiteContext& ctx) {
  SuiteResult s{"ode_oracle"};
  const auto t_start = std::chrono::steady_clock::now();
  const Reaction m{TrigPoly(1.0, {{0.5, 1.0, 0.0}}), TrigPoly(1.0)};
  const auto v = ap_positive_solution(m, 100.0, 50.0, 1e-3);
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "oracle.csv", {"t", "v_star", "oracle", "diff"});
  double sup = 0;
  for (Eigen::Index i = 0; i < v.size(); i += 50) {
    const auto o = logistic_oracle(m, v.time(i));
    const double d = std::abs(v.values[i] - o.value);
    sup = std::max(sup, d);
    w.write_row({csv_num(v.time(i)), csv_num(v.values[i]), csv_num(o.value), csv_num(d)});
  }
  check(s, "attracting state vs closed-form quadrature, sup over [0,50] < 1e-6", sup < 1e-6,
        "sup_diff=" + csv_num(sup));
  check(s, "oracle comparison under 5 s",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() < 5.0, "");
  return s;
}

// ---- 5. speed consistency -------------------------------------------------

SuiteResult suite_speed_consistency(const SuiteContext& ctx) {
  SuiteResult s{"speed_consistency"};
  const auto t_start = std::chrono::steady_clock::now();
  const auto m = fisher();
  const std::vector<double> mus = {0.5, 1.0, 2.0, 5.0};

  struct Probe {
    double c_shoot = 0, c_semi = 0, c_front = 0;
    std::string error;
    bool ok = false;
  };
  std::vector<Probe> probes(mus.size());
  const double lstar = critical_length({TrigPoly(1.0)}, CriticalKind::NeumannDirichlet, 0.0, {0.5, 4.0}, 128, 40.0).l;

  parallel_indexed(int(mus.size()), ctx.workers, [&](int i) {
    Probe& p = probes[std::size_t(i)];
    try {
      const double mu = mus[std::size_t(i)];
      p.c_shoot = shoot_autonomous(1.0, 1.0, mu).c;
      SemiWaveParams<double> sp;
      sp.X = 30;
      sp.N = 600;
      sp.dt = 1e-3;
      sp.horizon = 60;
      p.c_semi = semiwave_evolve(m, mu, sp).cstar;
      FrontParams<double> fp;
      fp.N = 1200;
      fp.dt = 5e-4;
      fp.horizon = 40;
      const auto traj = fb_evolve_single(m, mu, hump(0.8, 1.8), 1.8, fp);
      const auto outcome = classify(traj, lstar, 1.0);
      p.c_front = front_speed(traj, outcome, 0.4).value;
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });

  CsvWriter w(fs::path(ctx.out_dir) / s.name / "speeds.csv",
              {"mu", "c_front", "c_semiwave", "c_shoot", "rel_front_semi", "rel_semi_shoot"});
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const auto& p = probes[i];
    if (!p.ok) {
      check(s, "mu=" + csv_num(mus[i]), false, p.error);
      continue;
    }
    const double rel_fs = std::abs(p.c_front - p.c_semi) / p.c_semi;
    const double rel_ss = std::abs(p.c_semi - p.c_shoot) / p.c_shoot;
    w.write_row({csv_num(mus[i]), csv_num(p.c_front), csv_num(p.c_semi), csv_num(p.c_shoot), csv_num(rel_fs),
                 csv_num(rel_ss)});
    check(s, "mu=" + csv_num(mus[i]) + " three estimates within mutual 2%", rel_fs < 0.02 && rel_ss < 0.02,
          "front=" + csv_num(p.c_front) + " semi=" + csv_num(p.c_semi) + " shoot=" + csv_num(p.c_shoot));
    check(s, "mu=" + csv_num(mus[i]) + " speed below the whole-line bound 2", p.c_shoot < 2.0 && p.c_semi < 2.0,
          "");
  }
  bool increasing = true;
  for (std::size_t i = 1; i < probes.size(); ++i)
    increasing = increasing && probes[i].c_semi > probes[i - 1].c_semi && probes[i].c_shoot > probes[i - 1].c_shoot;
  check(s, "speeds strictly increasing in mu", increasing, "");
  check(s, "full sweep under 5 min",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() < 300.0, "");
  return s;
}

// ---- 6. dichotomy threshold ----------------------------------------------

SuiteResult suite_dichotomy_threshold(const SuiteContext& ctx) {
  SuiteResult s{"dichotomy_threshold"};
  const auto m = fisher();
  const double lstar = critical_length({TrigPoly(1.0)}, CriticalKind::NeumannDirichlet, 0.0, {0.5, 4.0}, 200, 50.0).l;

  CsvWriter w(fs::path(ctx.out_dir) / s.name / "dichotomy.csv",
              {"case", "N", "dt", "verdict", "h_final", "u_sup_final"});
  const auto run_case = [&](const std::string& label, double mu, double h0, int N, double dt) {
    FrontParams<double> fp;
    fp.N = N;
    fp.dt = dt;
    fp.horizon = 40;
    const auto traj = fb_evolve_single(m, mu, hump(0.8, h0), h0, fp);
    const auto outcome = classify(traj, lstar, 1.0);
    w.write_row({label, std::to_string(N), csv_num(dt), to_string(outcome.verdict), csv_num(outcome.h_final),
                 csv_num(outcome.u_sup_final)});
    return outcome;
  };

  const auto v0 = run_case("vanish_base", 0.05, 1.2, 400, 5e-4);
  check(s, "mu=0.05, h0=1.2 vanishes", v0.verdict == Verdict::Vanishing, "h_final=" + csv_num(v0.h_final));
  check(s, "vanishing front stays within 1.05 l*", v0.h_final <= 1.05 * kPi / 2.0,
        "h_final=" + csv_num(v0.h_final) + " bound=" + csv_num(1.05 * kPi / 2.0));
  check(s, "vanishing profile decayed below 1e-4", v0.u_sup_final < 1e-4, "sup=" + csv_num(v0.u_sup_final));

  const auto s0 = run_case("spread_base", 1.0, 1.8, 400, 5e-4);
  check(s, "mu=1, h0=1.8 spreads", s0.verdict == Verdict::Spreading, "h_final=" + csv_num(s0.h_final));

  const auto v1 = run_case("vanish_refined", 0.05, 1.2, 800, 2.5e-4);
  const auto s1 = run_case("spread_refined", 1.0, 1.8, 800, 2.5e-4);
  check(s, "verdicts stable under one grid refinement",
        v1.verdict == Verdict::Vanishing && s1.verdict == Verdict::Spreading, "");
  return s;
}

// ---- 7. critical mu --------------------------------------------------------

SuiteResult suite_critical_mu(const SuiteContext& ctx) {
  SuiteResult s{"critical_mu"};
  const auto t_start = std::chrono::steady_clock::now();
  const auto m = fisher();
  const double Lstar = critical_length({TrigPoly(1.0)}, CriticalKind::DirichletDrift, 0.0, {1.0, 6.0}, 200, 50.0).l;

  CriticalMuParams<double> prm;
  prm.front.N = 300;
  prm.front.dt = 5e-4;
  prm.front.horizon = 40;
  prm.lstar = Lstar;
  prm.min_vstar = 1.0;
  prm.rel_width = 0.05;
  prm.horizon_cap_factor = 8;

  const auto u0 = arch(0.5, -1.0, 1.0);
  const auto result = critical_mu(m, u0, -1.0, 1.0, {0.01, 10.0}, prm);

  CsvWriter w(fs::path(ctx.out_dir) / s.name / "critical_mu.csv", {"mu", "verdict", "horizon_used"});
  for (const auto& p : result.probes) w.write_row({csv_num(p.mu), to_string(p.verdict), csv_num(p.horizon_used)});
  CsvWriter ws(fs::path(ctx.out_dir) / s.name / "bracket.csv", {"mu_lo", "mu_hi", "rel_width", "converged"});
  const double rel = (result.mu_hi - result.mu_lo) / ((result.mu_hi + result.mu_lo) / 2.0);
  ws.write_row({csv_num(result.mu_lo), csv_num(result.mu_hi), csv_num(rel), result.converged ? "1" : "0"});

  check(s, "bisection converged to a bracket of relative width <= 5%", result.converged && rel <= 0.05,
        "bracket=[" + csv_num(result.mu_lo) + ", " + csv_num(result.mu_hi) + "]");

  // monotone verdicts re-verified at +-10 % around the bracket
  const auto verify = [&](double mu) {
    FrontParams<double> fp = prm.front;
    for (int ext = 0;; ++ext) {
      const auto traj = fb_evolve_double(m, mu, u0, -1.0, 1.0, fp);
      const auto v = classify(traj, Lstar, 1.0).verdict;
      if (v != Verdict::Undetermined || (1 << (ext + 1)) > prm.horizon_cap_factor) return v;
      fp.horizon *= 2;
    }
  };
  check(s, "vanishing re-verified 10% below the bracket", verify(0.9 * result.mu_lo) == Verdict::Vanishing, "");
  check(s, "spreading re-verified 10% above the bracket", verify(1.1 * result.mu_hi) == Verdict::Spreading, "");
  check(s, "bisection with re-verification under 10 min",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() < 600.0, "");
  return s;
}

// ---- 8. double front symmetry and common speed ----------------------------

SuiteResult suite_double_front(const SuiteContext& ctx) {
  SuiteResult s{"double_front"};
  const auto m = fisher();
  FrontParams<double> fp;
  fp.N = 500;
  fp.dt = 5e-4;
  fp.horizon = 30;
  const auto traj = fb_evolve_double(m, 2.0, arch(0.8, -1.5, 1.5), -1.5, 1.5, fp);

  double asym = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) asym = std::max(asym, std::abs(traj.g[i] + traj.h[i]));
  check(s, "even data: max |g + h| < 1e-8", asym < 1e-8, "max=" + csv_num(asym));

  const double Lstar = critical_length({TrigPoly(1.0)}, CriticalKind::DirichletDrift, 0.0, {1.0, 6.0}, 128, 40.0).l;
  const auto outcome = classify(traj, Lstar, 1.0);
  check(s, "run spreads", outcome.verdict == Verdict::Spreading, "width=" + csv_num(outcome.width_final));

  const double cstar = shoot_autonomous(1.0, 1.0, 2.0).c;
  const auto right = front_speed(traj, outcome, 0.4, FrontSide::Right);
  const auto left = front_speed(traj, outcome, 0.4, FrontSide::Left);
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "double_front.csv",
              {"cstar", "slope_right", "slope_left", "max_asymmetry"});
  w.write_row({csv_num(cstar), csv_num(right.value), csv_num(left.value), csv_num(asym)});
  check(s, "right front speed within 2% of c*", std::abs(right.value - cstar) < 0.02 * cstar,
        "slope=" + csv_num(right.value) + " c*=" + csv_num(cstar));
  check(s, "left front speed within 2% of c*", std::abs(left.value - cstar) < 0.02 * cstar,
        "slope=" + csv_num(left.value) + " c*=" + csv_num(cstar));
  return s;
}

// ---- 9. part-metric contraction -------------------------------------------

SuiteResult suite_part_metric(const SuiteContext& ctx) {
  SuiteResult s{"part_metric"};
  const auto m = fisher();
  const double v0 = vstar_initial(m, -1.0, 1e-3);
  const double X = 30;
  const int N = 400;
  const double dt = 2e-3, horizon = 40;
  HalfLineSolver<double> inner(m, 1.0, X, N, dt, [v0](double x) { return v0 * (1.0 - std::exp(-x / 10.0)); }, v0);
  HalfLineSolver<double> outer(m, 1.0, X, N, dt, semiwave_high_start<double>(v0), v0);

  CsvWriter w(fs::path(ctx.out_dir) / s.name / "part_metric.csv", {"t", "rho"});
  std::vector<double> rho{part_metric(inner.values(), outer.values())};
  w.write_row({"0", csv_num(rho.back())});
  const long steps = std::lround(horizon / dt);
  bool monotone = true;
  for (long i = 1; i <= steps; ++i) {
    inner.step();
    outer.step();
    if (i % 100 == 0) {
      const double r = part_metric(inner.values(), outer.values(), 1e-8);
      monotone = monotone && r <= rho.back() + 1e-6;
      rho.push_back(r);
      w.write_row({csv_num(inner.t()), csv_num(r)});
    }
  }
  check(s, "rho nonincreasing within 1e-6 at every sample", monotone, "");
  check(s, "rho strictly decreases over the transient", rho[rho.size() / 4] < rho.front() - 1e-3,
        "rho0=" + csv_num(rho.front()) + " quarter=" + csv_num(rho[rho.size() / 4]));
  check(s, "rho ends small", rho.back() < 1e-4, "rho_final=" + csv_num(rho.back()));
  return s;
}

// ---- 10. comparison ordering -----------------------------------------------

SuiteResult suite_comparison_ordering(const SuiteContext& ctx) {
  SuiteResult s{"comparison_ordering"};
  const auto m = fisher();
  FrontParams<double> fp;
  fp.N = 400;
  fp.dt = 5e-4;
  fp.horizon = 15;
  const auto lo = fb_evolve_single(m, 1.0, hump(0.5, 1.5), 1.5, fp);
  const auto hi = fb_evolve_single(m, 1.0, hump(1.0, 2.0), 2.0, fp);

  double worst_h = -1e300;
  for (std::size_t i = 0; i < lo.t.size(); ++i) worst_h = std::max(worst_h, lo.h[i] - hi.h[i]);
  check(s, "fronts stay ordered within 1e-8", worst_h <= 1e-8, "max(h1-h2)=" + csv_num(worst_h));

  double worst_u = -1e300;
  for (std::size_t k = 0; k < lo.snapshots.size(); ++k) {
    const auto& a = lo.snapshots[k];
    const auto& b = hi.snapshots[k];
    for (int i = 0; i <= fp.N; ++i) {
      const double x = a.h * i / fp.N;
      worst_u = std::max(worst_u, a.v[i] - snapshot_value_at(b, FrontMode::Single, x));
    }
  }
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "ordering.csv", {"max_front_violation", "max_profile_violation"});
  w.write_row({csv_num(worst_h), csv_num(worst_u)});
  check(s, "profiles stay ordered on the common domain (1e-6 interpolation slack)", worst_u <= 1e-6,
        "max(u1-u2)=" + csv_num(worst_u));
  return s;
}

// ---- 11. eps bracketing ------------------------------------------------------

SuiteResult suite_eps_bracketing(const SuiteContext& ctx) {
  SuiteResult s{"eps_bracketing"};
  const auto m = fisher();
  SemiWaveParams<double> sp;
  sp.X = 30;
  sp.N = 600;
  sp.dt = 1e-3;
  sp.horizon = 60;

  const std::vector<double> eps = {0.1, 0.05, 0.01};
  struct Slot {
    double lo = 0, hi = 0;
    bool ok = false;
    std::string error;
  };
  std::vector<Slot> slots(eps.size() + 1);
  parallel_indexed(int(eps.size()) + 1, ctx.workers, [&](int i) {
    try {
      if (i == 0) {
        slots[0].lo = slots[0].hi = semiwave_evolve(m, 1.0, sp).cstar;
      } else {
        const auto br = eps_bracket(m, 1.0, eps[std::size_t(i - 1)], sp);
        slots[std::size_t(i)].lo = br.c_lower;
        slots[std::size_t(i)].hi = br.c_upper;
      }
      slots[std::size_t(i)].ok = true;
    } catch (const std::exception& e) {
      slots[std::size_t(i)].error = e.what();
    }
  });

  if (!slots[0].ok) {
    check(s, "base speed", false, slots[0].error);
    return s;
  }
  const double cstar = slots[0].lo;
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "brackets.csv", {"eps", "c_lower", "cstar", "c_upper", "gap"});
  double prev_gap = 1e300;
  bool shrinking = true;
  for (std::size_t j = 1; j < slots.size(); ++j) {
    if (!slots[j].ok) {
      check(s, "eps=" + csv_num(eps[j - 1]), false, slots[j].error);
      continue;
    }
    const double gap = slots[j].hi - slots[j].lo;
    w.write_row({csv_num(eps[j - 1]), csv_num(slots[j].lo), csv_num(cstar), csv_num(slots[j].hi), csv_num(gap)});
    check(s, "eps=" + csv_num(eps[j - 1]) + " brackets c*", slots[j].lo <= cstar && cstar <= slots[j].hi,
          "c_lo=" + csv_num(slots[j].lo) + " c*=" + csv_num(cstar) + " c_hi=" + csv_num(slots[j].hi));
    shrinking = shrinking && gap < prev_gap;
    prev_gap = gap;
  }
  check(s, "bracket gap shrinks monotonically with eps", shrinking, "");
  return s;
}

// ---- 12. locally uniform convergence behind the front -----------------------

SuiteResult suite_locally_uniform_convergence(const SuiteContext& ctx) {
  SuiteResult s{"locally_uniform_convergence"};
  const auto m = fisher();
  const double cstar = shoot_autonomous(1.0, 1.0, 1.0).c;
  const double eps = 0.25 * cstar;

  FrontParams<double> fp;
  fp.N = 1600;
  fp.dt = 5e-4;
  fp.horizon = 64;
  fp.snapshot_stride = 4000;  // snapshots land on t = 32 and t = 64 exactly
  const auto traj = fb_evolve_single(m, 1.0, hump(0.8, 1.8), 1.8, fp);

  const auto deviation_at = [&](double t_want) {
    for (const auto& snap : traj.snapshots) {
      if (std::abs(snap.t - t_want) > 1e-9) continue;
      const double x_max = (cstar - eps) * t_want;
      double worst = 0;
      for (int j = 0; j <= 512; ++j) {
        const double x = x_max * j / 512.0;
        worst = std::max(worst, std::abs(snapshot_value_at(snap, FrontMode::Single, x) - 1.0));
      }
      return worst;
    }
    throw std::runtime_error("no snapshot at t=" + std::to_string(t_want));
  };

  const double d_half = deviation_at(32.0);
  const double d_full = deviation_at(64.0);
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "convergence_behind_front.csv",
              {"t", "x_max", "max_dev_from_vstar"});
  w.write_row({"32", csv_num((cstar - eps) * 32.0), csv_num(d_half)});
  w.write_row({"64", csv_num((cstar - eps) * 64.0), csv_num(d_full)});
  check(s, "max over x <= (c*-eps)t of |u - V*| below 1e-2 at the horizon", d_full < 1e-2,
        "dev=" + csv_num(d_full));
  check(s, "deviation smaller than at half horizon", d_full < d_half,
        "half=" + csv_num(d_half) + " full=" + csv_num(d_full));
  return s;
}

// ---- 13. conservation and refinement orders ---------------------------------

SuiteResult suite_conservation_refinement(const SuiteContext& ctx) {
  SuiteResult s{"conservation_refinement"};
  const auto m = fisher();
  CsvWriter w(fs::path(ctx.out_dir) / s.name / "convergence.csv", {"quantity", "level", "N", "dt", "value"});

  // conservation residual halving
  {
    FrontParams<double> coarse;
    coarse.N = 200;
    coarse.dt = 2e-3;
    coarse.horizon = 8;
    FrontParams<double> fine = coarse;
    fine.N = 400;
    fine.dt = 1e-3;
    const double r0 = mass_balance_residual(fb_evolve_single(m, 1.0, hump(0.8, 1.8), 1.8, coarse)).sup_norm(0.5);
    const double r1 = mass_balance_residual(fb_evolve_single(m, 1.0, hump(0.8, 1.8), 1.8, fine)).sup_norm(0.5);
    w.write_row({"mass_residual", "0", "200", csv_num(2e-3), csv_num(r0)});
    w.write_row({"mass_residual", "1", "400", csv_num(1e-3), csv_num(r1)});
    check(s, "mass residual halves from (N,dt) to (2N,dt/2)", r0 / r1 >= 2.0, "ratio=" + csv_num(r0 / r1));
  }

  const auto order = [](double v0, double v1, double v2) { return std::log2(std::abs(v0 - v1) / std::abs(v1 - v2)); };

  // exponent refinement against the closed form
  {
    const LinearCoefficient<double> zero{TrigPoly(0.0)};
    double v[3];
    int Ns[3] = {100, 200, 400};
    double dts[3] = {1e-2, 5e-3, 2.5e-3};
    for (int j = 0; j < 3; ++j) {
      v[j] = lyapunov_nd(zero, 2.0, Ns[j], 50.0, dts[j]).value;
      w.write_row({"lambda", std::to_string(j), std::to_string(Ns[j]), csv_num(dts[j]), csv_num(v[j])});
    }
    const double exact = -kPi * kPi / 16.0;
    const bool monotone = std::abs(v[0] - exact) > std::abs(v[1] - exact) && std::abs(v[1] - exact) > std::abs(v[2] - exact);
    const double p = order(v[0], v[1], v[2]);
    check(s, "exponent observed order >= 1.5", p >= 1.5, "p=" + csv_num(p));
    check(s, "exponent errors monotone decreasing", monotone, "");
  }

  // speed refinement
  {
    const double c_ref = shoot_autonomous(1.0, 1.0, 1.0).c;
    double v[3];
    int Ns[3] = {300, 600, 1200};
    double dts[3] = {2e-3, 1e-3, 5e-4};
    for (int j = 0; j < 3; ++j) {
      SemiWaveParams<double> sp;
      sp.X = 30;
      sp.N = Ns[j];
      sp.dt = dts[j];
      sp.horizon = 50;
      v[j] = semiwave_evolve(m, 1.0, sp).cstar;
      w.write_row({"cstar", std::to_string(j), std::to_string(Ns[j]), csv_num(dts[j]), csv_num(v[j])});
    }
    const double p = order(v[0], v[1], v[2]);
    check(s, "speed observed order >= 0.8", p >= 0.8, "p=" + csv_num(p));
    check(s, "speed errors monotone nonincreasing", std::abs(v[0] - c_ref) >= std::abs(v[1] - c_ref) &&
                                                        std::abs(v[1] - c_ref) >= std::abs(v[2] - c_ref),
          "errs=" + csv_num(std::abs(v[0] - c_ref)) + "," + csv_num(std::abs(v[1] - c_ref)) + "," +
              csv_num(std::abs(v[2] - c_ref)));
  }

  // front position at a fixed time
  {
    double v[3];
    int Ns[3] = {200, 400, 800};
    double dts[3] = {2e-3, 1e-3, 5e-4};
    for (int j = 0; j < 3; ++j) {
      FrontParams<double> fp;
      fp.N = Ns[j];
      fp.dt = dts[j];
      fp.horizon = 10;
      v[j] = fb_evolve_single(m, 1.0, hump(0.8, 1.8), 1.8, fp).h.back();
      w.write_row({"front_position", std::to_string(j), std::to_string(Ns[j]), csv_num(dts[j]), csv_num(v[j])});
    }
    const double p = order(v[0], v[1], v[2]);
    check(s, "front position observed order >= 1.5", p >= 1.5, "p=" + csv_num(p));
  }

  // synthetic linear front fit is exact at every level
  {
    FrontTrajectory<double> synth;
    synth.mode = FrontMode::Single;
    synth.mu = 1.0;
    synth.dt = 0.01;
    for (int i = 0; i <= 1000; ++i) {
      synth.t.push_back(0.01 * i);
      synth.h.push_back(2.0 * 0.01 * i + 1.0);
      synth.g.push_back(0.0);
    }
    ClassificationOutcome<double> oc;
    oc.verdict = Verdict::Spreading;
    const auto est = front_speed(synth, oc, 0.5);
    check(s, "synthetic linear front fit exact", std::abs(est.value - 2.0) < 1e-12 && est.rms_residual < 1e-12,
          "slope=" + csv_num(est.value));
  }
  return s;
}

// ---- determinism -------------------------------------------------------------

std::map<std::string, std::string> read_outputs(const fs::path& root, const fs::path& skip) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory()) {
      if (it->path() == skip) it.disable_recursion_pending();
      continue;
    }
    const auto ext = it->path().extension();
    if (ext != ".csv" && ext != ".jsonl") continue;
    std::ifstream in(it->path(), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    files[fs::relative(it->path(), root).string()] = std::move(bytes);
  }
  return files;
}

using SuiteFn = SuiteResult (*)(const SuiteContext&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"lyapunov_closed_forms", suite_lyapunov_closed_forms},
      {"lyapunov_mean_shift", suite_lyapunov_mean_shift},
      {"critical_lengths", suite_critical_lengths},
      {"ode_oracle", suite_ode_oracle},
      {"speed_consistency", suite_speed_consistency},
      {"dichotomy_threshold", suite_dichotomy_threshold},
      {"critical_mu", suite_critical_mu},
      {"double_front", suite_double_front},
      {"part_metric", suite_part_metric},
      {"comparison_ordering", suite_comparison_ordering},
      {"eps_bracketing", suite_eps_bracketing},
      {"locally_uniform_convergence", suite_locally_uniform_convergence},
      {"conservation_refinement", suite_conservation_refinement},
  };
  return table;
}

std::vector<SuiteResult> run_thirteen(const SuiteContext& ctx) {
  std::vector<SuiteResult> results;
  for (const auto& [name, fn] : suite_table()) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = fn(ctx);
    } catch (const std::exception& e) {
      r.name = name;
      r.checks.push_back({"suite completed", false, e.what()});
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!ctx.quiet)
      std::printf("suite %-32s %s (%.1f s)\n", r.name.c_str(), r.pass() ? "PASS" : "FAIL", r.seconds);
    results.push_back(std::move(r));
  }
  return results;
}

SuiteResult determinism_from(const SuiteContext& ctx) {
  // full second pass, byte-compared against the first
  const auto t0 = std::chrono::steady_clock::now();
  SuiteContext recheck = ctx;
  recheck.out_dir = (fs::path(ctx.out_dir) / "determinism_recheck").string();
  run_thirteen(recheck);

  SuiteResult s{"determinism"};
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto a = read_outputs(ctx.out_dir, fs::path(ctx.out_dir) / "determinism_recheck");
  const auto b = read_outputs(recheck.out_dir, fs::path());
  bool same_set = true, same_bytes = true;
  std::string first_diff;
  for (const auto& [rel, bytes] : a) {
    const auto it = b.find(rel);
    if (it == b.end()) {
      same_set = false;
      first_diff = rel + " missing in second pass";
      break;
    }
    if (it->second != bytes) {
      same_bytes = false;
      first_diff = rel;
      break;
    }
  }
  if (same_set && a.size() != b.size()) {
    same_set = false;
    first_diff = "extra files in second pass";
  }
  check(s, "two full passes produce byte-identical CSV outputs", same_set && same_bytes,
        first_diff.empty() ? std::to_string(a.size()) + " files compared" : first_diff);
  return s;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suite_table()) names.push_back(name);
  names.push_back("determinism");
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteContext& ctx) {
  if (name == "determinism") {
    run_thirteen(ctx);
    return determinism_from(ctx);
  }
  for (const auto& [n, fn] : suite_table())
    if (n == name) {
      const auto t0 = std::chrono::steady_clock::now();
      SuiteResult r = fn(ctx);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

std::vector<SuiteResult> run_all_suites(const SuiteContext& ctx) {
  auto results = run_thirteen(ctx);
  auto det = determinism_from(ctx);
  if (!ctx.quiet) std::printf("suite %-32s %s\n", det.name.c_str(), det.pass() ? "PASS" : "FAIL");
  results.push_back(std::move(det));
  return results;
}

}  // namespace fbkpp::harness
