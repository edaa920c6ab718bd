#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fbkpp/semiwave.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbkpp;

namespace {
Reaction fisher() { return Reaction{TrigPoly(1.0), TrigPoly(1.0)}; }
Reaction forced() { return Reaction{TrigPoly(1.0, {{0.5, 1.0, 0.0}}), TrigPoly(1.0)}; }

SemiWaveParams<double> quick_params() {
  SemiWaveParams<double> p;
  p.X = 30;
  p.N = 400;
  p.dt = 2e-3;
  p.horizon = 40;
  return p;
}
}  // namespace

TEST_CASE("part metric basics") {
  Vec u(5);
  u << 0.0, 0.5, 1.0, 1.5, 2.0;
  CHECK(part_metric(u, u) == 0.0);
  CHECK(part_metric(u, Vec(2.0 * u)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  Vec w = u;
  w[2] = 0.2;
  CHECK_THROWS_AS(part_metric(u, w), std::invalid_argument);
}

TEST_CASE("shooting oracle is monotone in mu and below the linear bound") {
  double prev = 0;
  for (double mu : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const auto r = shoot_autonomous(1.0, 1.0, mu);
    CHECK(r.c > prev);
    CHECK(r.c < 2.0);
    CHECK(r.c == doctest::Approx(mu * r.qprime0).epsilon(1e-6));
    prev = r.c;
  }
}

TEST_CASE("shooting oracle scaling invariance") {
  // q -> q/b leaves the profile problem invariant: c(a, b, mu) = c(a, 1, mu/b)
  const auto lhs = shoot_autonomous(1.0, 2.0, 3.0);
  const auto rhs = shoot_autonomous(1.0, 1.0, 1.5);
  CHECK(lhs.c == doctest::Approx(rhs.c).epsilon(1e-6));

  const auto big = shoot_autonomous(4.0, 1.0, 1.0);
  CHECK(big.c < 4.0);
  CHECK(big.c > 0.0);
}

TEST_CASE("half-line evolve agrees with the shooting oracle") {
  const auto r = semiwave_evolve(fisher(), 1.0, quick_params());
  const auto s = shoot_autonomous(1.0, 1.0, 1.0);
  CHECK(std::abs(r.cstar - s.c) / s.c < 0.02);
  CHECK(r.attraction_gap < 1e-5);
  CHECK(r.negative_clips == 0);
}

TEST_CASE("far field sits on the kinetic state, unforced at mid-domain") {
  const auto r = semiwave_evolve(forced(), 1.0, quick_params());
  for (std::size_t j = 0; j < r.profile_window.size(); ++j) {
    const auto& s = r.profile_window[j];
    CHECK(std::abs(s.values[s.N] - r.window_vstar[j]) < 1e-3);       // pinned
    CHECK(std::abs(s.values[s.N / 2] - r.window_vstar[j]) < 1e-2);   // genuine
  }
}

TEST_CASE("monotone data stay monotone") {
  const auto r = semiwave_evolve(fisher(), 1.0, quick_params());
  for (const auto& s : r.profile_window)
    for (int i = 0; i + 1 <= s.N; ++i) CHECK(s.values[i + 1] - s.values[i] >= -1e-8);
}

TEST_CASE("periodic forcing gives a periodic profile window") {
  SemiWaveParams<double> p = quick_params();
  p.dt = kTwoPi / 4096.0;           // commensurate step
  p.horizon = 16.0 * kTwoPi;        // window covers > two periods
  p.window_snapshots = 17;
  const auto r = semiwave_evolve(forced(), 1.0, p);
  // snapshots are evenly spaced over [horizon/2, horizon]: 8 periods, so
  // snapshots 2 apart differ by exactly one period
  for (std::size_t j = 0; j + 2 < r.profile_window.size(); ++j) {
    const auto& s0 = r.profile_window[j];
    const auto& s1 = r.profile_window[j + 2];
    CHECK(std::abs(s1.t - s0.t - kTwoPi) < 1e-9);
    CHECK((s1.values - s0.values).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("two-start gap decays monotonically after the transient") {
  const auto m = fisher();
  SemiWaveParams<double> p = quick_params();
  const double v0 = vstar_initial(m, -1.0, 1e-3);
  HalfLineSolver<double> lo(m, 1.0, p.X, p.N, p.dt, semiwave_low_start<double>(v0), v0);
  HalfLineSolver<double> hi(m, 1.0, p.X, p.N, p.dt, semiwave_high_start<double>(v0), v0);
  std::vector<double> gaps;
  const long steps = std::lround(p.horizon / p.dt);
  for (long i = 0; i < steps; ++i) {
    lo.step();
    hi.step();
    if (i % 500 == 0) gaps.push_back((lo.values() - hi.values()).cwiseAbs().maxCoeff());
  }
  for (std::size_t j = 2; j < gaps.size(); ++j) CHECK(gaps[j] <= gaps[j - 1] + 1e-12);
}

TEST_CASE("part metric contracts along ordered runs") {
  const auto m = fisher();
  SemiWaveParams<double> p = quick_params();
  const double v0 = vstar_initial(m, -1.0, 1e-3);
  // nested starts with the same far-field limit
  HalfLineSolver<double> inner(m, 1.0, p.X, p.N, p.dt,
                               [v0](double x) { return v0 * (1.0 - std::exp(-x / 10.0)); }, v0);
  HalfLineSolver<double> outer(m, 1.0, p.X, p.N, p.dt, semiwave_high_start<double>(v0), v0);
  double prev = part_metric(inner.values(), outer.values());
  bool strictly_contracted = false;
  const long steps = std::lround(p.horizon / p.dt);
  for (long i = 1; i <= steps; ++i) {
    inner.step();
    outer.step();
    if (i % 200 == 0) {
      const double rho = part_metric(inner.values(), outer.values(), 1e-8);
      CHECK(rho <= prev + 1e-6);
      if (rho < prev - 1e-3) strictly_contracted = true;
      prev = rho;
    }
  }
  CHECK(strictly_contracted);
  CHECK(prev < 1e-4);
}

TEST_CASE("eps brackets the speed and tightens") {
  const auto m = fisher();
  SemiWaveParams<double> p = quick_params();
  const double base = semiwave_evolve(m, 1.0, p).cstar;

  const auto z = eps_bracket(m, 1.0, 0.0, p);
  CHECK(z.c_lower == z.c_upper);

  double prev_gap = 1e300;
  for (double eps : {0.1, 0.05}) {
    const auto br = eps_bracket(m, 1.0, eps, p);
    CHECK(br.c_lower <= base);
    CHECK(base <= br.c_upper);
    CHECK(br.c_upper - br.c_lower < prev_gap);
    CHECK(br.c_upper - br.c_lower < 0.1 + 1e-9);
    prev_gap = br.c_upper - br.c_lower;
  }
}

TEST_CASE("speed is nondecreasing in mu") {
  SemiWaveParams<double> p = quick_params();
  double prev = 0;
  for (double mu : {0.5, 1.0, 2.0}) {
    const double c = semiwave_evolve(fisher(), mu, p).cstar;
    CHECK(c > prev - 1e-9);
    prev = c;
  }
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(semiwave_evolve(Reaction{TrigPoly(-1.0), TrigPoly(1.0)}, 1.0, quick_params()),
                  std::invalid_argument);
  SemiWaveParams<double> p = quick_params();
  p.X = 5;
  CHECK_THROWS_AS(semiwave_evolve(fisher(), 1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(eps_bracket(fisher(), 1.0, 2.0, quick_params()), std::invalid_argument);
}

TEST_CASE("shooting reports saturation once mu outruns the slope resolution") {
  // near the linear bound the connecting slope drops below what the inner
  // shoot can resolve; for such mu the solver refuses rather than returning
  // a speed it cannot certify
  CHECK_THROWS_AS(shoot_autonomous(1.0, 1.0, 1e12), std::runtime_error);
}
