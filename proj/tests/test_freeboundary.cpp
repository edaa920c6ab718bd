#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fbkpp/freeboundary.hpp"

#include "fbkpp/semiwave.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbkpp;

namespace {
const double kPi = M_PI;

Reaction fisher() { return Reaction{TrigPoly(1.0), TrigPoly(1.0)}; }

std::function<double(double)> cosine_hump(double amplitude, double h0) {
  return [amplitude, h0](double x) { return amplitude * std::cos(kPi * x / (2.0 * h0)); };
}
std::function<double(double)> sine_arch(double amplitude, double g0, double h0) {
  return [amplitude, g0, h0](double x) { return amplitude * std::sin(kPi * (x - g0) / (h0 - g0)); };
}
}  // namespace

TEST_CASE("zero data stay zero with a resting front") {
  FrontParams<double> p;
  p.N = 64;
  p.dt = 1e-3;
  p.horizon = 2;
  const auto traj = fb_evolve_single(fisher(), 1.0, [](double) { return 0.0; }, 1.5, p);
  CHECK(traj.u_sup.back() == 0.0);
  CHECK(traj.h.back() == 1.5);
  CHECK(traj.h_dot.back() == 0.0);
}

TEST_CASE("initial data validation") {
  FrontParams<double> p;
  p.N = 64;
  p.dt = 1e-3;
  p.horizon = 1;
  // nonzero at the front
  CHECK_THROWS_AS(fb_evolve_single(fisher(), 1.0, [](double) { return 1.0; }, 1.0, p), std::invalid_argument);
  // slope at the fixed end
  CHECK_THROWS_AS(fb_evolve_single(fisher(), 1.0, [](double x) { return 1.0 - x; }, 1.0, p), std::invalid_argument);
  // negative values
  CHECK_THROWS_AS(
      fb_evolve_double(fisher(), 1.0, [](double x) { return -std::sin(kPi * (x + 1.0) / 2.0); }, -1.0, 1.0, p),
      std::invalid_argument);
}

TEST_CASE("spreading run matches the shooting speed") {
  FrontParams<double> p;
  p.N = 600;
  p.dt = 1e-3;
  p.horizon = 25;
  const auto traj = fb_evolve_single(fisher(), 1.0, cosine_hump(0.8, 1.8), 1.8, p);

  // front never recedes
  for (double hd : traj.h_dot) CHECK(hd >= -1e-12);
  // positivity and bound
  for (const auto& s : traj.snapshots) {
    CHECK(s.v.minCoeff() >= 0.0);
    CHECK(s.v.maxCoeff() <= 1.0 * (1.0 + 1e-6));
  }

  const auto outcome = classify(traj, kPi / 2.0, 1.0);
  CHECK(outcome.verdict == Verdict::Spreading);

  const auto est = front_speed(traj, outcome, 0.4);
  const auto oracle = shoot_autonomous(1.0, 1.0, 1.0);
  CHECK(std::abs(est.value - oracle.c) / oracle.c < 0.02);
  CHECK(est.rms_residual < 0.05);
}

TEST_CASE("small mu below the critical length vanishes") {
  FrontParams<double> p;
  p.N = 200;
  p.dt = 1e-3;
  p.horizon = 30;
  const auto traj = fb_evolve_single(fisher(), 0.05, cosine_hump(0.8, 1.2), 1.2, p);

  const auto outcome = classify(traj, kPi / 2.0, 1.0);
  CHECK(outcome.verdict == Verdict::Vanishing);
  CHECK(outcome.h_final <= 1.05 * kPi / 2.0);
  CHECK(outcome.u_sup_final < 1e-4);
  // decay of the sup after the initial adjustment
  const std::size_t half = traj.u_sup.size() / 2;
  for (std::size_t i = half + 1; i < traj.u_sup.size(); ++i) CHECK(traj.u_sup[i] <= traj.u_sup[i - 1] + 1e-12);

  CHECK_THROWS_AS(front_speed(traj, outcome), std::invalid_argument);
}

TEST_CASE("short runs are undetermined") {
  FrontParams<double> p;
  p.N = 64;
  p.dt = 1e-3;
  p.horizon = 2;
  const auto traj = fb_evolve_single(fisher(), 1.0, cosine_hump(0.5, 1.5), 1.5, p);
  CHECK(classify(traj, kPi / 2.0, 1.0).verdict == Verdict::Undetermined);
}

TEST_CASE("synthetic linear front fits exactly") {
  FrontTrajectory<double> traj;
  traj.mode = FrontMode::Single;
  traj.mu = 1.0;
  traj.dt = 0.01;
  for (int i = 0; i <= 1000; ++i) {
    traj.t.push_back(0.01 * i);
    traj.h.push_back(2.0 * 0.01 * i + 1.0);
    traj.g.push_back(0.0);
  }
  ClassificationOutcome<double> outcome;
  outcome.verdict = Verdict::Spreading;
  const auto est = front_speed(traj, outcome, 0.5);
  CHECK(est.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(est.rms_residual < 1e-12);
}

TEST_CASE("nested data keep ordered fronts and profiles") {
  FrontParams<double> p;
  p.N = 300;
  p.dt = 1e-3;
  p.horizon = 10;
  const auto lo = fb_evolve_single(fisher(), 1.0, cosine_hump(0.5, 1.5), 1.5, p);
  const auto hi = fb_evolve_single(fisher(), 1.0, cosine_hump(1.0, 2.0), 2.0, p);

  for (std::size_t i = 0; i < lo.t.size(); ++i) CHECK(lo.h[i] <= hi.h[i] + 1e-8);
  REQUIRE(lo.snapshots.size() == hi.snapshots.size());
  for (std::size_t k = 0; k < lo.snapshots.size(); ++k) {
    const auto& a = lo.snapshots[k];
    const auto& b = hi.snapshots[k];
    for (int i = 0; i <= lo.N; ++i) {
      const double x = a.h * i / lo.N;
      CHECK(a.v[i] <= snapshot_value_at(b, FrontMode::Single, x) + 1e-6);
    }
  }
}

TEST_CASE("double front: even data stay mirror symmetric") {
  FrontParams<double> p;
  p.N = 200;
  p.dt = 1e-3;
  p.horizon = 12;
  const auto traj = fb_evolve_double(fisher(), 2.0, sine_arch(0.5, -1.0, 1.0), -1.0, 1.0, p);
  double worst = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    worst = std::max(worst, std::abs(traj.g[i] + traj.h[i]));
    CHECK(traj.h_dot[i] >= -1e-12);
    CHECK(traj.g_dot[i] <= 1e-12);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("double front spreading reaches the single-front speed") {
  FrontParams<double> p;
  p.N = 500;
  p.dt = 1e-3;
  p.horizon = 25;
  const auto traj = fb_evolve_double(fisher(), 1.5, sine_arch(0.8, -2.0, 2.0), -2.0, 2.0, p);
  const auto outcome = classify(traj, kPi, 1.0);
  REQUIRE(outcome.verdict == Verdict::Spreading);
  const auto right = front_speed(traj, outcome, 0.4, FrontSide::Right);
  const auto left = front_speed(traj, outcome, 0.4, FrontSide::Left);
  const auto oracle = shoot_autonomous(1.0, 1.0, 1.5);
  CHECK(std::abs(right.value - oracle.c) / oracle.c < 0.02);
  CHECK(std::abs(left.value - oracle.c) / oracle.c < 0.02);
}

TEST_CASE("mass balance residual vanishes for the zero run and refines") {
  FrontParams<double> coarse;
  coarse.N = 200;
  coarse.dt = 2e-3;
  coarse.horizon = 8;
  const auto zero = fb_evolve_single(fisher(), 1.0, [](double) { return 0.0; }, 1.5, coarse);
  CHECK(mass_balance_residual(zero).sup_norm() == 0.0);

  const auto run_c = fb_evolve_single(fisher(), 1.0, cosine_hump(0.8, 1.8), 1.8, coarse);
  FrontParams<double> fine = coarse;
  fine.N = 400;
  fine.dt = 1e-3;
  const auto run_f = fb_evolve_single(fisher(), 1.0, cosine_hump(0.8, 1.8), 1.8, fine);
  const double rc = mass_balance_residual(run_c).sup_norm(0.5);
  const double rf = mass_balance_residual(run_f).sup_norm(0.5);
  CHECK(rc / rf >= 2.0);
}

TEST_CASE("residual decays along a vanishing run") {
  FrontParams<double> p;
  p.N = 200;
  p.dt = 1e-3;
  p.horizon = 30;
  const auto traj = fb_evolve_single(fisher(), 0.05, cosine_hump(0.8, 1.2), 1.2, p);
  const auto res = mass_balance_residual(traj);
  double tail = 0;
  for (std::size_t i = res.t.size() - 100; i < res.t.size(); ++i) tail = std::max(tail, std::abs(res.r[i]));
  CHECK(tail < 1e-10);
}

TEST_CASE("critical mu rejects a width at or above the critical length") {
  CriticalMuParams<double> prm;
  prm.lstar = kPi;
  prm.min_vstar = 1.0;
  CHECK_THROWS_AS(critical_mu(fisher(), sine_arch(0.5, -2.0, 2.0), -2.0, 2.0, {0.01, 10.0}, prm),
                  std::invalid_argument);
}

TEST_CASE("doubling the horizon halves the endpoint-ratio bias") {
  FrontParams<double> p;
  p.N = 400;
  p.dt = 1e-3;
  p.horizon = 12;
  ClassificationOutcome<double> spreading;
  spreading.verdict = Verdict::Spreading;

  const auto short_run = fb_evolve_single(fisher(), 1.0, cosine_hump(0.8, 1.8), 1.8, p);
  const auto e1 = front_speed(short_run, spreading, 0.4);
  p.horizon = 24;
  const auto long_run = fb_evolve_single(fisher(), 1.0, cosine_hump(0.8, 1.8), 1.8, p);
  const auto e2 = front_speed(long_run, spreading, 0.4);

  const double bias1 = std::abs(e1.endpoint_ratio - e1.value);
  const double bias2 = std::abs(e2.endpoint_ratio - e2.value);
  CHECK(bias2 <= bias1 / 2.0);
}

TEST_CASE("doubling the initial mass never flips spreading to vanishing") {
  // mu fixed above the threshold for this geometry
  FrontParams<double> p;
  p.N = 300;
  p.dt = 1e-3;
  p.horizon = 25;
  const auto small = fb_evolve_double(fisher(), 2.0, sine_arch(0.5, -1.0, 1.0), -1.0, 1.0, p);
  const auto large = fb_evolve_double(fisher(), 2.0, sine_arch(1.0, -1.0, 1.0), -1.0, 1.0, p);
  CHECK(classify(small, kPi, 1.0).verdict == Verdict::Spreading);
  CHECK(classify(large, kPi, 1.0).verdict == Verdict::Spreading);
  // and the larger data keep a lead in front position throughout
  for (std::size_t i = 0; i < small.t.size(); ++i) CHECK(small.h[i] <= large.h[i] + 1e-8);
}
