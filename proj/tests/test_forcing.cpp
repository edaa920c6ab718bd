#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fbkpp/forcing.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fbkpp;

namespace {
const double kSqrt2 = std::sqrt(2.0);

TrigPoly two_mode() { return TrigPoly(1.0, {{0.5, 1.0, 0.0}, {0.3, kSqrt2, 0.0}}); }
}  // namespace

TEST_CASE("evaluation matches the mode sum") {
  CHECK(ap_eval(two_mode(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ap_eval(TrigPoly(3.25), 17.0) == 3.25);
  TrigPoly quarter(0.0, {{1.0, 1.0, M_PI / 2}});
  CHECK(ap_eval(quarter, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampled sup never exceeds the amplitude bound") {
  const TrigPoly p = two_mode();
  const double bound = p.upper_bound();
  double sup = -1e300;
  for (int i = 0; i <= 200000; ++i) sup = std::max(sup, p(i * 0.01));
  CHECK(sup <= bound + 1e-14);
  CHECK(sup > bound - 0.05);  // the bound is near-attained for these phases
}

TEST_CASE("mean is the constant term and matches quadrature") {
  CHECK(ap_mean(two_mode()) == 1.0);
  CHECK(ap_mean(TrigPoly(-2.5)) == -2.5);

  // trapezoid average over [0, 1e4]
  const TrigPoly p = two_mode();
  const double T = 1e4;
  const int n = 2000000;
  const double h = T / n;
  double acc = 0.5 * (p(0.0) + p(T));
  for (int i = 1; i < n; ++i) acc += p(i * h);
  const double avg = acc * h / T;
  CHECK(std::abs(avg - 1.0) < 1e-3);
}

TEST_CASE("finite-window averages converge like C/T") {
  const TrigPoly p = two_mode();
  const double c = 10.0 * p.abs_bound();
  for (double T : {50.0, 200.0, 1000.0, 5000.0}) {
    const double avg = p.integral(0.0, T) / T;
    CHECK(std::abs(avg - ap_mean(p)) <= c / T);
  }
}

TEST_CASE("translation updates phases and acts as a group") {
  const TrigPoly p = two_mode();
  CHECK(identical(ap_translate(p, 0.0), p));

  const TrigPoly unit(0.0, {{1.0, 1.0, 0.0}});
  CHECK(identical(ap_translate(unit, kTwoPi), unit));

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng), tau = u(rng);
    CHECK(ap_eval(ap_translate(p, tau), t) == doctest::Approx(ap_eval(p, t + tau)).epsilon(1e-12));
  }

  // composition law checked by evaluation
  for (int i = 0; i < 50; ++i) {
    const double t = u(rng), t1 = u(rng), t2 = u(rng);
    const auto once = ap_translate(ap_translate(p, t1), t2);
    const auto both = ap_translate(p, t1 + t2);
    CHECK(ap_eval(once, t) == doctest::Approx(ap_eval(both, t)).epsilon(1e-12));
  }
}

TEST_CASE("single-frequency forcing is exactly periodic") {
  const TrigPoly p(0.7, {{0.4, 2.0, 1.1}});
  const double period = kTwoPi / 2.0;
  for (int i = 0; i < 40; ++i) {
    const double t = -7.0 + 0.37 * i;
    CHECK(p(t + period) == doctest::Approx(p(t)).epsilon(1e-13));
  }
}

TEST_CASE("construction rejects bad modes") {
  CHECK_THROWS_AS(TrigPoly(0.0, {{1.0, -1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TrigPoly(0.0, {{1.0, 0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TrigPoly(std::nan(""), {}), std::invalid_argument);
}

TEST_CASE("hypothesis checks") {
  SUBCASE("constant logistic model passes with unit carrying bound") {
    const Reaction m{TrigPoly(1.0), TrigPoly(1.0)};
    const auto rep = check_hypotheses(m);
    CHECK(rep.ok());
    CHECK(rep.m_bound == doctest::Approx(1.0));
  }
  SUBCASE("negative mean growth fails the mean condition") {
    const auto rep = check_hypotheses(Reaction{TrigPoly(-1.0), TrigPoly(1.0)});
    CHECK_FALSE(rep.h3_ok);
    CHECK(rep.h1_ok);
    CHECK_FALSE(rep.ok());
  }
  SUBCASE("limitation with amplitude below one keeps inf b positive") {
    const Reaction m{TrigPoly(1.0, {{0.5, 1.0, 0.0}}), TrigPoly(1.0, {{0.99, 1.0, 0.0}})};
    const auto rep = check_hypotheses(m);
    CHECK(rep.h1_ok);
    CHECK(rep.inf_b_analytic == doctest::Approx(0.01));
    CHECK(rep.inf_b_sampled >= rep.inf_b_analytic - 1e-12);
  }
  SUBCASE("limitation touching zero fails") {
    const Reaction m{TrigPoly(1.0, {{0.5, 1.0, 0.0}}), TrigPoly(1.0, {{1.0, 1.0, 0.0}})};
    CHECK_FALSE(check_hypotheses(m).h1_ok);
  }
}

TEST_CASE("text round trip") {
  const TrigPoly p = two_mode();
  const TrigPoly q = trig_poly_from_text(to_text(p));
  CHECK(identical(p, q));

  const TrigPoly c = trig_poly_from_text("2.5");
  CHECK(c.constant_term() == 2.5);
  CHECK(c.mode_count() == 0);
  CHECK(identical(trig_poly_from_text("2.5 |"), c));

  CHECK_THROWS_AS(trig_poly_from_text("1 | 0.5:1"), std::invalid_argument);
  CHECK_THROWS_AS(trig_poly_from_text("x | 0.5:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(trig_poly_from_text("1 | 0.5:-1:0"), std::invalid_argument);
}
