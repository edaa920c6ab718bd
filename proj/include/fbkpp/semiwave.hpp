#pragma once

// The half-line problem with nonlocal boundary drift
//
//     u_t = u_xx - mu u_x(t,0) u_x(t,x) + u f(t,u),   0 < x < infinity,
//     u(t,0) = 0,
//
// whose attracting time almost periodic state is the semi-wave profile seen
// from the moving front; mu times the time average of the boundary flux
// u_x(t,0) is the spreading speed.
//
// Discretization: uniform grid on [0, X] with the far end pinned to the
// attracting kinetic state V*(t) (carried alongside by RK4).  Diffusion is
// Crank-Nicolson; the reaction and the nonlocal drift are explicit with one
// predictor/corrector pass, so each stage is a tridiagonal solve and the
// step is second order.  The boundary flux uses one-sided second-order
// differencing since the speed is an average of exactly this quantity.
//
// The evolve runs two ordered starts (a low hump and a near-V* profile) and
// gates on their sup-disagreement over the averaging window.
//
// shoot_autonomous is the independent oracle for constant coefficients: the
// steady profile solves q'' - c q' + q(a - b q) = 0, q(0) = 0, q(inf) = a/b,
// and the speed is the fixed point of c = mu q'(0), located by a double
// shooting loop (inner: connect to the saddle; outer: the fixed point).

#include "fbkpp/forcing.hpp"
#include "fbkpp/kinetics.hpp"
#include "fbkpp/tridiag.hpp"
#include "fbkpp/types.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fbkpp {

template <typename Scalar>
struct HalfLineState {
  Scalar X = 0;
  int N = 0;
  Scalar t = 0;
  Vector<Scalar> values;  // u(t, x_i), x_i = i X / N
  Scalar flux0 = 0;       // u_x(t, 0), one-sided second order
};

template <typename Scalar>
struct SemiWaveResult {
  std::vector<HalfLineState<Scalar>> profile_window;
  std::vector<Scalar> window_vstar;  // V*(t) at the snapshot times
  Scalar cstar = 0;                  // mu * window average of flux0
  Vector<Scalar> flux_times, flux_values;
  Scalar attraction_gap = 0;  // final two-start sup-disagreement
  Scalar window_begin = 0, window_end = 0;
  long negative_clips = 0;
};

template <typename Scalar>
struct SemiWaveParams {
  Scalar X = 30;
  int N = 600;
  Scalar dt = 1e-3;
  Scalar horizon = 60;
  Scalar spinup = -1;  // auto: 100 / mean(a)
  Scalar ode_dt = 1e-3;
  int window_snapshots = 33;
  Scalar attraction_tol = 1e-5;
};

/// Time stepper for one profile of the truncated half-line problem.
template <typename Scalar>
class HalfLineSolver {
 public:
  HalfLineSolver(ReactionModel<Scalar> m, Scalar mu, Scalar X, int N, Scalar dt,
                 const std::function<Scalar(Scalar)>& u0, Scalar vstar0, Scalar t0 = 0)
      : model_(std::move(m)),
        mu_(mu),
        X_(X),
        N_(N),
        dx_(X / Scalar(N)),
        dt_(dt),
        t_(t0),
        vstar_(model_, t0, vstar0),
        v_(N + 1) {
    if (N < 16) throw std::invalid_argument("HalfLineSolver: need at least 16 cells");
    if (!(mu > Scalar(0))) throw std::invalid_argument("HalfLineSolver: mu must be positive");
    for (int i = 0; i <= N; ++i) v_[i] = u0(dx_ * Scalar(i));
    v_[0] = 0;
    v_[N] = vstar0;
    if (v_.minCoeff() < Scalar(0)) throw std::invalid_argument("HalfLineSolver: initial profile must be nonnegative");
    reaction_rate_bound_ = model_.a().abs_bound() + 2 * model_.b().upper_bound() * std::max(Scalar(2) * model_.m_bound(), v_.maxCoeff());
  }

  Scalar flux0() const { return (4 * v_[1] - v_[2]) / (2 * dx_); }
  Scalar t() const { return t_; }
  const Vector<Scalar>& values() const { return v_; }
  Scalar far_value() const { return vstar_.value(); }
  long clips() const { return clips_; }

  /// Advance by the configured dt, subdividing when the explicit terms
  /// would violate their stability limits.
  void step() {
    const Scalar adv = mu_ * std::abs(flux0());
    const Scalar dt_adv = Scalar(0.5) * dx_ / std::max(adv, Scalar(1e-12));
    const Scalar dt_react = Scalar(0.25) / reaction_rate_bound_;
    const long k = std::max<long>(1, static_cast<long>(std::ceil(dt_ / std::min(dt_adv, dt_react))));
    if (k > 4096) throw std::runtime_error("HalfLineSolver: stability substepping exploded; reduce dt or check data");
    for (long s = 0; s < k; ++s) imex_step(dt_ / Scalar(k));
  }

 private:
  void explicit_terms(Scalar time, const Vector<Scalar>& v, Scalar q, Vector<Scalar>& e) const {
    e.resize(N_ - 1);
    const Scalar drift = -mu_ * q;
    for (int i = 1; i < N_; ++i)
      e[i - 1] = drift * (v[i + 1] - v[i - 1]) / (2 * dx_) + v[i] * model_.f(time, v[i]);
  }

  void clip_negatives(Vector<Scalar>& v) {
    for (int i = 0; i <= N_; ++i)
      if (v[i] < Scalar(0)) {
        if (v[i] < Scalar(-1e-10)) ++clips_;
        v[i] = 0;
      }
  }

  void imex_step(Scalar dt) {
    const Scalar inv2 = Scalar(1) / (dx_ * dx_);
    const int n = N_ - 1;

    const Scalar q_n = flux0();
    Vector<Scalar> e_n;
    explicit_terms(t_, v_, q_n, e_n);

    vstar_.advance(dt);
    const Scalar vfar_new = vstar_.value();

    // A v^n on the interior; the old boundary values enter here
    Vector<Scalar> av(n);
    for (int i = 1; i < N_; ++i) av[i - 1] = (v_[i - 1] - 2 * v_[i] + v_[i + 1]) * inv2;

    Vector<Scalar> sub(n - 1), diag(n), sup(n - 1), scratch;
    sub.setConstant(-dt / 2 * inv2);
    sup.setConstant(-dt / 2 * inv2);
    diag.setConstant(1 + dt * inv2);

    // predictor: explicit terms frozen at t_n
    Vector<Scalar> rhs = v_.segment(1, n) + (dt / 2) * av + dt * e_n;
    rhs[n - 1] += dt / 2 * inv2 * vfar_new;
    solve_tridiagonal(sub, diag, sup, rhs, scratch);

    Vector<Scalar> vstar_profile(N_ + 1);
    vstar_profile[0] = 0;
    vstar_profile.segment(1, n) = rhs;
    vstar_profile[N_] = vfar_new;
    clip_negatives(vstar_profile);

    // corrector: trapezoidal in the explicit terms
    const Scalar q_star = (4 * vstar_profile[1] - vstar_profile[2]) / (2 * dx_);
    Vector<Scalar> e_star;
    explicit_terms(t_ + dt, vstar_profile, q_star, e_star);

    Vector<Scalar> rhs2 = v_.segment(1, n) + (dt / 2) * av + (dt / 2) * (e_n + e_star);
    rhs2[n - 1] += dt / 2 * inv2 * vfar_new;
    solve_tridiagonal(sub, diag, sup, rhs2, scratch);

    v_.segment(1, n) = rhs2;
    v_[0] = 0;
    v_[N_] = vfar_new;
    clip_negatives(v_);
    t_ += dt;
  }

  ReactionModel<Scalar> model_;
  Scalar mu_, X_;
  int N_;
  Scalar dx_, dt_, t_;
  OdeStepper<Scalar> vstar_;
  Vector<Scalar> v_;
  Scalar reaction_rate_bound_;
  long clips_ = 0;
};

/// Default ordered starts bracketing the attractor: a low hump and a
/// profile already near V*.
template <typename Scalar>
std::function<Scalar(Scalar)> semiwave_low_start(Scalar vstar0) {
  return [vstar0](Scalar x) { return std::min(vstar0, x / Scalar(10)); };
}
template <typename Scalar>
std::function<Scalar(Scalar)> semiwave_high_start(Scalar vstar0) {
  return [vstar0](Scalar x) { return vstar0 * std::tanh(x); };
}

/// Evolve the truncated problem from the two standard starts, gate on their
/// agreement after horizon/2, and average the boundary flux over the
/// trailing half to produce the spreading speed.
template <typename Scalar>
SemiWaveResult<Scalar> semiwave_evolve(const ReactionModel<Scalar>& m, Scalar mu, const SemiWaveParams<Scalar>& p,
                                       std::function<Scalar(Scalar)> u0_low = nullptr,
                                       std::function<Scalar(Scalar)> u0_high = nullptr) {
  if (!check_hypotheses(m).ok()) throw std::invalid_argument("semiwave_evolve: model fails hypotheses");
  const Scalar mean_a = ap_mean(m.a());
  if (p.X < Scalar(10) / std::sqrt(mean_a))
    throw std::invalid_argument("semiwave_evolve: X below ten front widths");

  const Scalar v0 = vstar_initial(m, p.spinup, p.ode_dt);
  if (!u0_low) u0_low = semiwave_low_start<Scalar>(v0);
  if (!u0_high) u0_high = semiwave_high_start<Scalar>(v0);

  HalfLineSolver<Scalar> lo(m, mu, p.X, p.N, p.dt, u0_low, v0);
  HalfLineSolver<Scalar> hi(m, mu, p.X, p.N, p.dt, u0_high, v0);

  const long n_steps = std::llround(double(p.horizon / p.dt));
  const long n_half = n_steps / 2;

  SemiWaveResult<Scalar> out;
  out.flux_times.resize(n_steps + 1);
  out.flux_values.resize(n_steps + 1);
  out.flux_times[0] = 0;
  out.flux_values[0] = lo.flux0();

  // snapshot the low run at evenly spaced steps across the averaging window
  const int snaps = std::max(2, p.window_snapshots);
  std::vector<long> snap_at;
  for (int j = 0; j < snaps; ++j) snap_at.push_back(n_half + (n_steps - n_half) * j / (snaps - 1));
  std::size_t next_snap = 0;
  const auto maybe_snapshot = [&](long i) {
    while (next_snap < snap_at.size() && snap_at[next_snap] == i) {
      HalfLineState<Scalar> s;
      s.X = p.X;
      s.N = p.N;
      s.t = lo.t();
      s.values = lo.values();
      s.flux0 = lo.flux0();
      out.profile_window.push_back(std::move(s));
      out.window_vstar.push_back(lo.far_value());
      ++next_snap;
    }
  };
  maybe_snapshot(0);

  Scalar window_gap = 0;
  for (long i = 1; i <= n_steps; ++i) {
    lo.step();
    hi.step();
    out.flux_times[i] = lo.t();
    out.flux_values[i] = lo.flux0();
    if (i >= n_half) window_gap = std::max(window_gap, (lo.values() - hi.values()).cwiseAbs().maxCoeff());
    if (i >= n_steps / 4 && mu * lo.flux0() <= Scalar(0))
      throw std::runtime_error("semiwave_evolve: boundary flux collapsed; parameters sit on the vanishing side");
    maybe_snapshot(i);
  }
  out.attraction_gap = window_gap;
  if (window_gap > p.attraction_tol)
    throw std::runtime_error("semiwave_evolve: two-start disagreement " + std::to_string(double(window_gap)) +
                             " exceeds tolerance; raise horizon or X");

  // speed: mu times the trapezoid average of the boundary flux over the window
  Scalar acc = 0;
  for (long i = n_half; i < n_steps; ++i) acc += (out.flux_values[i] + out.flux_values[i + 1]) / 2 * p.dt;
  out.window_begin = out.flux_times[n_half];
  out.window_end = out.flux_times[n_steps];
  out.cstar = mu * acc / (out.window_end - out.window_begin);
  out.negative_clips = lo.clips() + hi.clips();
  return out;
}

/// Log-ratio order metric between ordered positive profiles; the pinned
/// node x = 0 is excluded and nodes where u1 is below the floor are guarded.
template <typename Scalar>
Scalar part_metric(const Vector<Scalar>& u1, const Vector<Scalar>& u2, Scalar order_slack = Scalar(1e-10),
                   Scalar floor = Scalar(1e-12)) {
  if (u1.size() != u2.size()) throw std::invalid_argument("part_metric: size mismatch");
  Scalar ratio = 1;
  for (Eigen::Index i = 1; i < u1.size(); ++i) {
    if (u2[i] < u1[i] - order_slack) throw std::invalid_argument("part_metric: profiles are not ordered");
    if (u1[i] < floor) continue;
    ratio = std::max(ratio, u2[i] / u1[i]);
  }
  return std::log(ratio);
}

template <typename Scalar>
struct ShootResult {
  Scalar c = 0;
  Scalar qprime0 = 0;
  int outer_iterations = 0;
};

namespace detail {

enum class ShotOutcome { Undershoot, Overshoot, NearManifold };

// Integrate q' = p, p' = c p - q (a - b q) from (0, s) and classify against
// the saddle at q = a/b.
template <typename Scalar>
ShotOutcome shoot_profile(Scalar a, Scalar b, Scalar c, Scalar s, Scalar hx, Scalar x_max) {
  const Scalar q_saddle = a / b;
  Scalar q = 0, p = s;
  const auto f_q = [](Scalar, Scalar pp) { return pp; };
  const auto f_p = [a, b, c](Scalar qq, Scalar pp) { return c * pp - qq * (a - b * qq); };
  for (Scalar x = 0; x < x_max; x += hx) {
    const Scalar k1q = f_q(q, p), k1p = f_p(q, p);
    const Scalar k2q = f_q(q + hx / 2 * k1q, p + hx / 2 * k1p), k2p = f_p(q + hx / 2 * k1q, p + hx / 2 * k1p);
    const Scalar k3q = f_q(q + hx / 2 * k2q, p + hx / 2 * k2p), k3p = f_p(q + hx / 2 * k2q, p + hx / 2 * k2p);
    const Scalar k4q = f_q(q + hx * k3q, p + hx * k3p), k4p = f_p(q + hx * k3q, p + hx * k3p);
    q += hx / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += hx / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (p <= Scalar(0)) return ShotOutcome::Undershoot;
    if (q >= q_saddle) return ShotOutcome::Overshoot;
  }
  return ShotOutcome::NearManifold;
}

// Initial slope of the orbit connecting the origin to the saddle.
template <typename Scalar>
Scalar connecting_slope(Scalar a, Scalar b, Scalar c, Scalar hx, Scalar x_max, Scalar tol) {
  Scalar s_lo = 0;
  Scalar s_hi = 2 * std::sqrt(a) * a / b;
  for (int grow = 0; grow < 12 && shoot_profile(a, b, c, s_hi, hx, x_max) != ShotOutcome::Overshoot; ++grow) s_hi *= 2;
  while (s_hi - s_lo > tol) {
    const Scalar mid = (s_lo + s_hi) / 2;
    const auto outcome = shoot_profile(a, b, c, mid, hx, x_max);
    if (outcome == ShotOutcome::NearManifold) return mid;
    (outcome == ShotOutcome::Undershoot ? s_lo : s_hi) = mid;
  }
  return (s_lo + s_hi) / 2;
}

}  // namespace detail

/// Semi-wave speed for the autonomous model f = a - b u: bisection on
/// c in (0, 2 sqrt(a)) for the fixed point c = mu q'(0), with the profile
/// slope found by an inner shoot onto the saddle.
template <typename Scalar>
ShootResult<Scalar> shoot_autonomous(Scalar a, Scalar b, Scalar mu) {
  if (!(a > Scalar(0) && b > Scalar(0) && mu > Scalar(0)))
    throw std::invalid_argument("shoot_autonomous: a, b, mu must be positive");
  const Scalar root_a = std::sqrt(a);
  const Scalar hx = Scalar(1e-3) / std::max(Scalar(1), root_a);
  const Scalar x_max = Scalar(120) / std::min(std::max(root_a, Scalar(0.2)), Scalar(5));
  const Scalar inner_tol = Scalar(1e-10);

  const auto residual = [&](Scalar c) { return mu * detail::connecting_slope(a, b, c, hx, x_max, inner_tol) - c; };

  Scalar c_lo = Scalar(1e-9), c_hi = 2 * root_a * (1 - Scalar(1e-12));
  if (residual(c_hi) >= Scalar(0))
    throw std::runtime_error("shoot_autonomous: speed saturates at the linear bound 2*sqrt(a); mu too large for the bracket");

  ShootResult<Scalar> out;
  while (c_hi - c_lo > Scalar(1e-8)) {
    const Scalar mid = (c_lo + c_hi) / 2;
    (residual(mid) > Scalar(0) ? c_lo : c_hi) = mid;
    ++out.outer_iterations;
  }
  out.c = (c_lo + c_hi) / 2;
  out.qprime0 = detail::connecting_slope(a, b, out.c, hx, x_max, inner_tol);
  return out;
}

template <typename Scalar>
struct EpsBracket {
  Scalar c_lower = 0;
  Scalar c_upper = 0;
};

/// Speeds of the problems with growth shifted by -eps and +eps; they
/// bracket the unperturbed speed and the gap shrinks with eps.
template <typename Scalar>
EpsBracket<Scalar> eps_bracket(const ReactionModel<Scalar>& m, Scalar mu, Scalar eps, const SemiWaveParams<Scalar>& p) {
  if (eps < Scalar(0) || eps >= ap_mean(m.a())) throw std::invalid_argument("eps_bracket: need 0 <= eps < mean(a)");
  EpsBracket<Scalar> out;
  if (eps == Scalar(0)) {
    out.c_lower = out.c_upper = semiwave_evolve(m, mu, p).cstar;
    return out;
  }
  out.c_lower = semiwave_evolve(with_growth_shift(m, -eps), mu, p).cstar;
  out.c_upper = semiwave_evolve(with_growth_shift(m, eps), mu, p).cstar;
  return out;
}

}  // namespace fbkpp
