#pragma once

// Spatially homogeneous kinetics
//
//     u'(t) = u * f(t,u),   f(t,u) = a(t) - b(t) * u,
//
// integrated with classical RK4.  The unique attracting positive almost
// periodic state V*(t) is produced by forward attraction from two distinct
// starts with an agreement gate.  For this logistic family the Bernoulli
// substitution gives the closed form
//
//     V*(t) = 1 / integral_{-inf}^{t} exp(-integral_s^t a) b(s) ds,
//
// evaluated here by quadrature with the inner integral taken exactly per
// trig mode; it serves as an independent oracle for the time stepping.

#include "fbkpp/forcing.hpp"
#include "fbkpp/types.hpp"

#include <cmath>
#include <stdexcept>

namespace fbkpp {

template <typename Scalar>
struct ScalarTrajectory {
  Scalar t0 = 0;
  Scalar dt = 0;
  Vector<Scalar> values;
  long undershoot_clips = 0;

  Scalar time(Eigen::Index i) const { return t0 + dt * Scalar(i); }
  Eigen::Index size() const { return values.size(); }

  /// Linear interpolation inside the sampled window.
  Scalar at_time(Scalar t) const {
    const Scalar s = (t - t0) / dt;
    const Eigen::Index i = std::min<Eigen::Index>(std::max<Eigen::Index>(Eigen::Index(std::floor(s)), 0), values.size() - 2);
    const Scalar w = s - Scalar(i);
    return values[i] * (1 - w) + values[i + 1] * w;
  }
};

namespace detail {
template <typename Scalar>
Scalar kinetics_rhs(const ReactionModel<Scalar>& m, Scalar t, Scalar u) {
  return u * m.f(t, u);
}

template <typename Scalar>
Scalar rk4_step(const ReactionModel<Scalar>& m, Scalar t, Scalar u, Scalar dt) {
  const Scalar k1 = kinetics_rhs(m, t, u);
  const Scalar k2 = kinetics_rhs(m, t + dt / 2, u + dt / 2 * k1);
  const Scalar k3 = kinetics_rhs(m, t + dt / 2, u + dt / 2 * k2);
  const Scalar k4 = kinetics_rhs(m, t + dt, u + dt * k3);
  return u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}
}  // namespace detail

/// Lockstep RK4 integrator for u' = u f(t,u); used to carry V*(t) alongside
/// a PDE evolution at the PDE's own step size.
template <typename Scalar>
class OdeStepper {
 public:
  OdeStepper(ReactionModel<Scalar> m, Scalar t, Scalar u) : m_(std::move(m)), t_(t), u_(u) {}

  void advance(Scalar dt) {
    u_ = detail::rk4_step(m_, t_, u_, dt);
    if (u_ < Scalar(0)) u_ = Scalar(0);
    t_ += dt;
  }

  Scalar value() const { return u_; }
  Scalar time() const { return t_; }

 private:
  ReactionModel<Scalar> m_;
  Scalar t_, u_;
};

/// RK4 integration of u' = u f(t,u) on [t0, t1], sampled every dt.
/// Rejects models failing the hypotheses and steps beyond the stability
/// guard dt < 0.5 / sup|a|.  Undershoots below zero are clipped and counted.
template <typename Scalar>
ScalarTrajectory<Scalar> ode_integrate(const ReactionModel<Scalar>& m, Scalar u0, Scalar t0, Scalar t1, Scalar dt) {
  if (!(t1 > t0)) throw std::invalid_argument("ode_integrate: t1 must exceed t0");
  if (!(dt > Scalar(0))) throw std::invalid_argument("ode_integrate: dt must be positive");
  if (!(u0 >= Scalar(0))) throw std::invalid_argument("ode_integrate: u0 must be nonnegative");
  if (!check_hypotheses(m).ok()) throw std::invalid_argument("ode_integrate: model fails hypotheses");
  if (dt >= Scalar(0.5) / m.a().abs_bound()) throw std::invalid_argument("ode_integrate: dt exceeds stability guard 0.5/sup|a|");

  const Eigen::Index n = Eigen::Index(std::llround((t1 - t0) / dt));
  ScalarTrajectory<Scalar> out;
  out.t0 = t0;
  out.dt = dt;
  out.values.resize(n + 1);
  out.values[0] = u0;
  Scalar u = u0;
  for (Eigen::Index i = 0; i < n; ++i) {
    u = detail::rk4_step(m, t0 + dt * Scalar(i), u, dt);
    if (u < Scalar(0)) {
      u = Scalar(0);
      ++out.undershoot_clips;
    }
    out.values[i + 1] = u;
  }
  return out;
}

/// The attracting positive almost periodic state on [0, horizon]: integrate
/// from t = -spinup starting at the carrying bound, and gate the result
/// against a second run started near zero.  Disagreement above tol signals
/// insufficient spinup and fails the run.
template <typename Scalar>
ScalarTrajectory<Scalar> ap_positive_solution(const ReactionModel<Scalar>& m, Scalar spinup, Scalar horizon, Scalar dt,
                                              Scalar tol = Scalar(1e-6)) {
  if (spinup <= Scalar(0)) spinup = Scalar(100) / ap_mean(m.a());
  const Eigen::Index n_spin = Eigen::Index(std::ceil(spinup / dt));
  const Scalar t_start = -dt * Scalar(n_spin);

  const Scalar hi = m.m_bound();
  const Scalar lo = Scalar(1e-3) * m.m_bound();
  auto run_hi = ode_integrate(m, hi, t_start, horizon, dt);
  auto run_lo = ode_integrate(m, lo, t_start, horizon, dt);
  if (run_hi.undershoot_clips + run_lo.undershoot_clips > 0)
    throw std::runtime_error("ap_positive_solution: integration clipped below zero; reduce dt");

  Scalar gap = 0;
  for (Eigen::Index i = n_spin; i < run_hi.size(); ++i) gap = std::max(gap, std::abs(run_hi.values[i] - run_lo.values[i]));
  if (gap > tol)
    throw std::runtime_error("ap_positive_solution: two-start disagreement " + std::to_string(double(gap)) +
                             " exceeds tolerance; increase spinup");

  ScalarTrajectory<Scalar> out;
  out.t0 = 0;
  out.dt = dt;
  out.values = run_hi.values.segment(n_spin, run_hi.size() - n_spin);
  return out;
}

/// V*(0) with the same two-start gate; convenience for PDE far boundaries.
template <typename Scalar>
Scalar vstar_initial(const ReactionModel<Scalar>& m, Scalar spinup = Scalar(-1), Scalar dt = Scalar(1e-3)) {
  return ap_positive_solution(m, spinup, dt, dt).values[0];
}

template <typename Scalar>
struct OracleValue {
  Scalar value;
  Scalar truncation_bound;
};

/// Closed-form V*(t) by quadrature.  The improper integral is truncated at
/// `tail`; the truncation error is bounded by exp(-mean(a)*tail)*sup b/mean(a)
/// and reported alongside.  Composite Simpson on a fixed grid keeps the
/// result deterministic.
template <typename Scalar>
OracleValue<Scalar> logistic_oracle(const ReactionModel<Scalar>& m, Scalar t, Scalar tail = Scalar(-1)) {
  const Scalar mean_a = ap_mean(m.a());
  if (!(mean_a > Scalar(0))) throw std::invalid_argument("logistic_oracle: mean growth must be positive");
  if (tail <= Scalar(0)) tail = Scalar(40) / mean_a;

  // integrand over sigma >= 0:  exp(-integral_{t-sigma}^t a) * b(t-sigma)
  const auto g = [&](Scalar sigma) { return std::exp(-m.a().integral(t - sigma, t)) * m.b()(t - sigma); };

  long n = static_cast<long>(std::ceil(tail / Scalar(0.005)));
  n = std::min<long>(std::max<long>(n, 2000), 40000);
  if (n % 2 == 1) ++n;
  const Scalar h = tail / Scalar(n);
  Scalar sum = g(Scalar(0)) + g(tail);
  for (long i = 1; i < n; ++i) sum += g(h * Scalar(i)) * (i % 2 == 1 ? Scalar(4) : Scalar(2));
  const Scalar integral = sum * h / Scalar(3);

  OracleValue<Scalar> out;
  out.value = Scalar(1) / integral;
  out.truncation_bound = std::exp(-mean_a * tail) * m.b().upper_bound() / mean_a;
  return out;
}

}  // namespace fbkpp
