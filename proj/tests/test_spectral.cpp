#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fbkpp/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbkpp;

namespace {
const double kPi = M_PI;
LinearCoefficient<double> coeff(double c) { return {TrigPoly(c)}; }
LinearCoefficient<double> forced_coeff() {
  return {TrigPoly(1.0, {{0.5, 1.0, 0.0}, {0.3, std::sqrt(2.0), 0.0}})};
}
}  // namespace

TEST_CASE("pure diffusion decay rate, mixed boundary") {
  const double expected = -kPi * kPi / 16.0;  // l = 2
  const auto est = lyapunov_nd(coeff(0.0), 2.0, 200, 30.0, 5e-3);
  CHECK(est.converged);
  CHECK(std::abs(est.value - expected) / std::abs(expected) < 2e-3);
  CHECK(est.growth_log.size() == 30);
  double acc = 0;
  for (double gl : est.growth_log) acc += gl;
  CHECK(est.value == doctest::Approx(acc / est.horizon).epsilon(1e-14));
}

TEST_CASE("constant growth shifts the exponent") {
  const auto est = lyapunov_nd(coeff(1.0), 2.0, 200, 30.0, 5e-3);
  CHECK(std::abs(est.value - (1.0 - kPi * kPi / 16.0)) < 2e-3);

  const auto base = lyapunov_nd(coeff(0.0), 2.0, 200, 30.0, 5e-3);
  CHECK(est.value - base.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oscillating growth contributes exactly its mean") {
  const auto est = lyapunov_nd(forced_coeff(), 2.0, 200, 30.0, 5e-3);
  CHECK(std::abs(est.value - (1.0 - kPi * kPi / 16.0)) < 2e-3);
}

TEST_CASE("drifted Dirichlet problem") {
  const auto est = lyapunov_dd_drift(coeff(0.0), 1.0, kPi, 200, 30.0, 5e-3);
  CHECK(std::abs(est.value - (-1.25)) < 2e-3);

  const auto nodrift = lyapunov_dd_drift(coeff(0.0), 0.0, kPi, 200, 30.0, 5e-3);
  CHECK(std::abs(nodrift.value - (-1.0)) < 2e-3);

  const auto critical = lyapunov_dd_drift(forced_coeff(), 0.0, kPi, 200, 30.0, 5e-3);
  CHECK(std::abs(critical.value) < 2e-3);
}

TEST_CASE("monotone in the domain length") {
  double prev = -1e300;
  for (double l : {0.8, 1.2, 1.8, 2.5, 3.5}) {
    const auto est = lyapunov_nd(coeff(0.5), l, 128, 20.0, 5e-3);
    CHECK(est.value > prev - 1e-6);
    prev = est.value;
  }
}

TEST_CASE("grid refinement tightens at second order") {
  const double l = 2.0, dt = 2e-3;
  const double v1 = lyapunov_nd(coeff(0.0), l, 50, 30.0, dt).value;
  const double v2 = lyapunov_nd(coeff(0.0), l, 100, 30.0, dt).value;
  const double v3 = lyapunov_nd(coeff(0.0), l, 200, 30.0, dt).value;
  CHECK(std::abs(v1 - v2) / std::abs(v2 - v3) >= 3.0);
}

TEST_CASE("critical lengths from the closed forms") {
  const auto lstar = critical_length(coeff(1.0), CriticalKind::NeumannDirichlet, 0.0, {0.5, 4.0}, 128, 40.0);
  CHECK(lstar.probes <= 30);
  CHECK(std::abs(lstar.l - kPi / 2.0) < 1e-3);

  const auto Lstar = critical_length(coeff(1.0), CriticalKind::DirichletDrift, 0.0, {1.0, 6.0}, 128, 40.0);
  CHECK(Lstar.probes <= 30);
  CHECK(std::abs(Lstar.l - kPi) < 1e-3);
  CHECK(Lstar.l >= lstar.l);

  const auto quarter = critical_length(coeff(4.0), CriticalKind::NeumannDirichlet, 0.0, {0.25, 3.0}, 128, 40.0);
  CHECK(std::abs(quarter.l - kPi / 4.0) < 1e-3);
}

TEST_CASE("bracket without a sign change is rejected") {
  CHECK_THROWS_AS(critical_length(coeff(1.0), CriticalKind::NeumannDirichlet, 0.0, {2.0, 4.0}, 64, 20.0),
                  std::invalid_argument);
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(lyapunov_nd(coeff(0.0), 2.0, 8, 20.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_nd(coeff(0.0), 2.0, 100, 20.0, 0.5), std::invalid_argument);
}
