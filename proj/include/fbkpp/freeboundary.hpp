#pragma once

// Free boundary problems via front fixing.
//
// Single front:  u_t = u_xx + u f(t,u) on 0 < x < h(t),
//                u_x(t,0) = u(t,h(t)) = 0,  h'(t) = -mu u_x(t,h(t)).
// With xi = x/h(t) the moving domain becomes [0,1]:
//
//     v_t = v_xixi / h^2 + xi (h'/h) v_xi + v f(t,v),
//     v_xi(t,0) = 0 (ghost node),  v(t,1) = 0,
//     h' = -mu v_xi(t,1) / h.
//
// Double front:  u on g(t) < x < h(t) with u = 0 and a Stefan condition at
// both ends.  With xi = (2x - (h+g))/(h-g) in [-1,1] and s = h - g:
//
//     v_t = 4 v_xixi / s^2 + [(h'+g') + xi (h'-g')] / s * v_xi + v f(t,v),
//     h' = -mu (2/s) v_xi(t,1),   g' = -mu (2/s) v_xi(t,-1).
//
// Diffusion is Crank-Nicolson (one tridiagonal solve per stage); the
// transformed drift, the reaction and the Stefan updates are explicit with
// one predictor/corrector pass, so the front position is second order in dt.
// Front fluxes use one-sided second-order stencils.

#include "fbkpp/forcing.hpp"
#include "fbkpp/tridiag.hpp"
#include "fbkpp/types.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbkpp {

enum class FrontMode { Single, Double };

template <typename Scalar>
struct FrontSnapshot {
  Scalar t = 0, h = 0, g = 0;
  Vector<Scalar> v;  // on the reference grid
};

template <typename Scalar>
struct FrontTrajectory {
  FrontMode mode = FrontMode::Single;
  Scalar mu = 0;
  int N = 0;
  Scalar dt = 0;
  Scalar h0 = 0, g0 = 0;
  std::vector<Scalar> t, h, g, h_dot, g_dot, mass, u_sup, u_at_0, int_uf;
  std::vector<FrontSnapshot<Scalar>> snapshots;

  Scalar horizon() const { return t.empty() ? Scalar(0) : t.back(); }
  Scalar width_final() const { return h.back() - g.back(); }
};

/// Physical-space evaluation of a snapshot by cubic (4-point Lagrange)
/// interpolation on the reference grid.
template <typename Scalar>
Scalar snapshot_value_at(const FrontSnapshot<Scalar>& s, FrontMode mode, Scalar x) {
  const Eigen::Index n = s.v.size() - 1;
  Scalar xi;
  if (mode == FrontMode::Single) {
    if (x < Scalar(0) || x > s.h) return Scalar(0);
    xi = x / s.h;
  } else {
    if (x < s.g || x > s.h) return Scalar(0);
    xi = (2 * x - (s.h + s.g)) / (s.h - s.g);
  }
  const Scalar pos = mode == FrontMode::Single ? xi * Scalar(n) : (xi + 1) / 2 * Scalar(n);
  Eigen::Index i0 = Eigen::Index(std::floor(pos)) - 1;
  i0 = std::min<Eigen::Index>(std::max<Eigen::Index>(i0, 0), n - 3);
  const Scalar u = pos - Scalar(i0);
  Scalar acc = 0;
  for (int j = 0; j < 4; ++j) {
    Scalar w = 1;
    for (int k = 0; k < 4; ++k)
      if (k != j) w *= (u - Scalar(k)) / Scalar(j - k);
    acc += w * s.v[i0 + j];
  }
  return acc;
}

template <typename Scalar>
struct FrontParams {
  int N = 400;
  Scalar dt = 5e-4;
  Scalar horizon = 30;
  long snapshot_stride = 0;  // 0: pick ~32 snapshots
};

namespace detail {

template <typename Scalar, typename Profile>
void fb_validate_single(const Profile& u0, Scalar h0) {
  if (!(h0 > Scalar(0))) throw std::invalid_argument("front data: h0 must be positive");
  const Scalar d = h0 / Scalar(1000);
  Scalar sup = 0;
  for (int i = 0; i <= 1000; ++i) {
    const Scalar u = u0(d * Scalar(i));
    if (u < Scalar(0)) throw std::invalid_argument("front data: u0 must be nonnegative");
    sup = std::max(sup, u);
  }
  const Scalar scale = std::max(Scalar(1), sup);
  if (std::abs(u0(h0)) > Scalar(1e-9) * scale) throw std::invalid_argument("front data: u0(h0) must vanish");
  const Scalar slope0 = (-3 * u0(Scalar(0)) + 4 * u0(d) - u0(2 * d)) / (2 * d);
  if (std::abs(slope0) > Scalar(1e-5) * scale) throw std::invalid_argument("front data: u0'(0) must vanish");
}

template <typename Scalar, typename Profile>
void fb_validate_double(const Profile& u0, Scalar g0, Scalar h0) {
  if (!(h0 > g0)) throw std::invalid_argument("front data: need h0 > g0");
  const Scalar d = (h0 - g0) / Scalar(1000);
  Scalar sup = 0;
  for (int i = 0; i <= 1000; ++i) {
    const Scalar u = u0(g0 + d * Scalar(i));
    if (u < Scalar(0)) throw std::invalid_argument("front data: u0 must be nonnegative");
    sup = std::max(sup, u);
  }
  const Scalar scale = std::max(Scalar(1), sup);
  if (std::abs(u0(g0)) > Scalar(1e-9) * scale || std::abs(u0(h0)) > Scalar(1e-9) * scale)
    throw std::invalid_argument("front data: u0 must vanish at both fronts");
}

template <typename Scalar>
Scalar trapezoid(const Vector<Scalar>& v) {
  return v.sum() - (v[0] + v[v.size() - 1]) / 2;
}

}  // namespace detail

/// Evolve the single-front problem.  Records scalar series every step and
/// profile snapshots at the configured stride.
template <typename Scalar, typename Profile>
FrontTrajectory<Scalar> fb_evolve_single(const ReactionModel<Scalar>& m, Scalar mu, const Profile& u0, Scalar h0,
                                         const FrontParams<Scalar>& prm) {
  if (!check_hypotheses(m).ok()) throw std::invalid_argument("fb_evolve_single: model fails hypotheses");
  if (!(mu > Scalar(0))) throw std::invalid_argument("fb_evolve_single: mu must be positive");
  if (prm.N < 16) throw std::invalid_argument("fb_evolve_single: need at least 16 cells");
  detail::fb_validate_single(u0, h0);

  const int N = prm.N;
  const Scalar dxi = Scalar(1) / Scalar(N);
  Vector<Scalar> v(N + 1);
  for (int i = 0; i <= N; ++i) v[i] = u0(h0 * dxi * Scalar(i));
  v[N] = 0;

  Scalar h = h0, t = 0;
  const Scalar rate_bound = m.a().abs_bound() + 2 * m.b().upper_bound() * std::max(Scalar(2) * m.m_bound(), v.maxCoeff());

  const auto flux_xi = [&](const Vector<Scalar>& w) { return (w[N - 2] - 4 * w[N - 1]) / (2 * dxi); };
  const auto explicit_terms = [&](Scalar time, const Vector<Scalar>& w, Scalar hh, Scalar hdot, Vector<Scalar>& e) {
    e.resize(N);
    e[0] = w[0] * m.f(time, w[0]);  // xi = 0: drift vanishes
    const Scalar fac = hdot / hh / (2 * dxi);
    for (int i = 1; i < N; ++i)
      e[i] = dxi * Scalar(i) * fac * (w[i + 1] - w[i - 1]) + w[i] * m.f(time, w[i]);
  };
  const auto clip = [&](Vector<Scalar>& w) {
    for (int i = 0; i <= N; ++i)
      if (w[i] < Scalar(0)) w[i] = 0;
  };

  const long n_steps = std::llround(double(prm.horizon / prm.dt));
  const long stride = prm.snapshot_stride > 0 ? prm.snapshot_stride : std::max<long>(1, n_steps / 32);

  FrontTrajectory<Scalar> traj;
  traj.mode = FrontMode::Single;
  traj.mu = mu;
  traj.N = N;
  traj.dt = prm.dt;
  traj.h0 = h0;
  traj.g0 = 0;

  Vector<Scalar> e_n, e_star, av(N), sub(N - 1), diag(N), sup(N - 1), scratch, vp(N + 1), vn(N + 1), fv(N + 1);

  const auto record = [&]() {
    const Scalar q = flux_xi(v);
    traj.t.push_back(t);
    traj.h.push_back(h);
    traj.g.push_back(0);
    traj.h_dot.push_back(-mu * q / h);
    traj.g_dot.push_back(0);
    traj.mass.push_back(h * dxi * detail::trapezoid(v));
    traj.u_sup.push_back(v.maxCoeff());
    traj.u_at_0.push_back(v[0]);
    for (int i = 0; i <= N; ++i) fv[i] = v[i] * m.f(t, v[i]);
    traj.int_uf.push_back(h * dxi * detail::trapezoid(fv));
  };
  const auto snapshot = [&]() { traj.snapshots.push_back({t, h, Scalar(0), v}); };

  record();
  snapshot();

  const auto imex_step = [&](Scalar dt) {
    const Scalar q_n = flux_xi(v);
    const Scalar hdot_n = -mu * q_n / h;
    if (hdot_n < Scalar(-1e-9))
      throw std::runtime_error("fb_evolve_single: front receded at t=" + std::to_string(double(t)));

    explicit_terms(t, v, h, hdot_n, e_n);
    const Scalar c_n = Scalar(1) / (h * dxi) / (h * dxi);
    av[0] = (2 * v[1] - 2 * v[0]) * c_n;
    for (int i = 1; i < N; ++i) av[i] = (v[i - 1] - 2 * v[i] + v[i + 1]) * c_n;

    const auto build_matrix = [&](Scalar hh) {
      const Scalar c = Scalar(1) / (hh * dxi) / (hh * dxi);
      diag.setConstant(1 + dt * c);
      sub.setConstant(-dt / 2 * c);
      sup.setConstant(-dt / 2 * c);
      sup[0] = -dt * c;  // ghost node at the Neumann end
    };

    // predictor
    const Scalar h_pred = h + dt * hdot_n;
    build_matrix(h_pred);
    Vector<Scalar> rhs = v.head(N) + (dt / 2) * av + dt * e_n;
    solve_tridiagonal(sub, diag, sup, rhs, scratch);
    vp.head(N) = rhs;
    vp[N] = 0;
    clip(vp);

    // corrector
    const Scalar q_star = flux_xi(vp);
    const Scalar hdot_star = -mu * q_star / h_pred;
    const Scalar h_new = h + dt / 2 * (hdot_n + hdot_star);
    explicit_terms(t + dt, vp, h_new, hdot_star, e_star);
    build_matrix(h_new);
    Vector<Scalar> rhs2 = v.head(N) + (dt / 2) * av + (dt / 2) * (e_n + e_star);
    solve_tridiagonal(sub, diag, sup, rhs2, scratch);
    vn.head(N) = rhs2;
    vn[N] = 0;
    clip(vn);

    v = vn;
    h = h_new;
    t += dt;
  };

  for (long step = 1; step <= n_steps; ++step) {
    const Scalar hdot_est = std::abs(-mu * flux_xi(v) / h);
    const Scalar dt_adv = Scalar(0.5) * dxi * h / std::max(hdot_est, Scalar(1e-12));
    const Scalar dt_react = Scalar(0.25) / rate_bound;
    const long k = std::max<long>(1, static_cast<long>(std::ceil(prm.dt / std::min(dt_adv, dt_react))));
    if (k > 4096) throw std::runtime_error("fb_evolve_single: stability substepping exploded");
    for (long s = 0; s < k; ++s) imex_step(prm.dt / Scalar(k));
    record();
    if (step % stride == 0 || step == n_steps) snapshot();
  }
  return traj;
}

/// Evolve the double-front problem; both boundaries are straightened.
template <typename Scalar, typename Profile>
FrontTrajectory<Scalar> fb_evolve_double(const ReactionModel<Scalar>& m, Scalar mu, const Profile& u0, Scalar g0,
                                         Scalar h0, const FrontParams<Scalar>& prm) {
  if (!check_hypotheses(m).ok()) throw std::invalid_argument("fb_evolve_double: model fails hypotheses");
  if (!(mu > Scalar(0))) throw std::invalid_argument("fb_evolve_double: mu must be positive");
  if (prm.N < 16 || prm.N % 2 != 0) throw std::invalid_argument("fb_evolve_double: N must be even and >= 16");
  detail::fb_validate_double(u0, g0, h0);

  const int N = prm.N;
  const Scalar dxi = Scalar(2) / Scalar(N);
  const auto xi_at = [&](int i) { return Scalar(-1) + dxi * Scalar(i); };

  Vector<Scalar> v(N + 1);
  for (int i = 0; i <= N; ++i) v[i] = u0((g0 + h0) / 2 + xi_at(i) * (h0 - g0) / 2);
  v[0] = 0;
  v[N] = 0;

  Scalar h = h0, g = g0, t = 0;
  const Scalar rate_bound = m.a().abs_bound() + 2 * m.b().upper_bound() * std::max(Scalar(2) * m.m_bound(), v.maxCoeff());

  const auto flux_right = [&](const Vector<Scalar>& w) { return (w[N - 2] - 4 * w[N - 1]) / (2 * dxi); };
  const auto flux_left = [&](const Vector<Scalar>& w) { return (4 * w[1] - w[2]) / (2 * dxi); };
  const auto explicit_terms = [&](Scalar time, const Vector<Scalar>& w, Scalar ss, Scalar hdot, Scalar gdot,
                                  Vector<Scalar>& e) {
    e.resize(N - 1);
    for (int i = 1; i < N; ++i) {
      const Scalar drift = ((hdot + gdot) + xi_at(i) * (hdot - gdot)) / ss;
      e[i - 1] = drift * (w[i + 1] - w[i - 1]) / (2 * dxi) + w[i] * m.f(time, w[i]);
    }
  };
  const auto clip = [&](Vector<Scalar>& w) {
    for (int i = 0; i <= N; ++i)
      if (w[i] < Scalar(0)) w[i] = 0;
  };

  const long n_steps = std::llround(double(prm.horizon / prm.dt));
  const long stride = prm.snapshot_stride > 0 ? prm.snapshot_stride : std::max<long>(1, n_steps / 32);

  FrontTrajectory<Scalar> traj;
  traj.mode = FrontMode::Double;
  traj.mu = mu;
  traj.N = N;
  traj.dt = prm.dt;
  traj.h0 = h0;
  traj.g0 = g0;

  Vector<Scalar> e_n, e_star, av(N - 1), sub(N - 2), diag(N - 1), sup(N - 2), scratch, vp(N + 1), vn(N + 1), fv(N + 1);

  const auto record = [&]() {
    const Scalar s = h - g;
    traj.t.push_back(t);
    traj.h.push_back(h);
    traj.g.push_back(g);
    traj.h_dot.push_back(-mu * 2 / s * flux_right(v));
    traj.g_dot.push_back(-mu * 2 / s * flux_left(v));
    traj.mass.push_back(s / 2 * dxi * detail::trapezoid(v));
    traj.u_sup.push_back(v.maxCoeff());
    FrontSnapshot<Scalar> snap{t, h, g, v};
    traj.u_at_0.push_back(snapshot_value_at(snap, FrontMode::Double, Scalar(0)));
    for (int i = 0; i <= N; ++i) fv[i] = v[i] * m.f(t, v[i]);
    traj.int_uf.push_back(s / 2 * dxi * detail::trapezoid(fv));
  };
  const auto snapshot = [&]() { traj.snapshots.push_back({t, h, g, v}); };

  record();
  snapshot();

  const auto imex_step = [&](Scalar dt) {
    const Scalar s_n = h - g;
    const Scalar hdot_n = -mu * 2 / s_n * flux_right(v);
    const Scalar gdot_n = -mu * 2 / s_n * flux_left(v);
    if (hdot_n < Scalar(-1e-9) || gdot_n > Scalar(1e-9))
      throw std::runtime_error("fb_evolve_double: a front receded at t=" + std::to_string(double(t)));

    explicit_terms(t, v, s_n, hdot_n, gdot_n, e_n);
    const Scalar c_n = Scalar(4) / (s_n * dxi) / (s_n * dxi);
    for (int i = 1; i < N; ++i) av[i - 1] = (v[i - 1] - 2 * v[i] + v[i + 1]) * c_n;

    const auto build_matrix = [&](Scalar ss) {
      const Scalar c = Scalar(4) / (ss * dxi) / (ss * dxi);
      diag.setConstant(1 + dt * c);
      sub.setConstant(-dt / 2 * c);
      sup.setConstant(-dt / 2 * c);
    };

    // predictor
    const Scalar h_pred = h + dt * hdot_n;
    const Scalar g_pred = g + dt * gdot_n;
    build_matrix(h_pred - g_pred);
    Vector<Scalar> rhs = v.segment(1, N - 1) + (dt / 2) * av + dt * e_n;
    solve_tridiagonal(sub, diag, sup, rhs, scratch);
    vp.segment(1, N - 1) = rhs;
    vp[0] = 0;
    vp[N] = 0;
    clip(vp);

    // corrector
    const Scalar s_pred = h_pred - g_pred;
    const Scalar hdot_star = -mu * 2 / s_pred * flux_right(vp);
    const Scalar gdot_star = -mu * 2 / s_pred * flux_left(vp);
    const Scalar h_new = h + dt / 2 * (hdot_n + hdot_star);
    const Scalar g_new = g + dt / 2 * (gdot_n + gdot_star);
    explicit_terms(t + dt, vp, h_new - g_new, hdot_star, gdot_star, e_star);
    build_matrix(h_new - g_new);
    Vector<Scalar> rhs2 = v.segment(1, N - 1) + (dt / 2) * av + (dt / 2) * (e_n + e_star);
    solve_tridiagonal(sub, diag, sup, rhs2, scratch);
    vn.segment(1, N - 1) = rhs2;
    vn[0] = 0;
    vn[N] = 0;
    clip(vn);

    v = vn;
    h = h_new;
    g = g_new;
    t += dt;
  };

  for (long step = 1; step <= n_steps; ++step) {
    const Scalar s = h - g;
    const Scalar rate = std::max(std::abs(flux_right(v)), std::abs(flux_left(v))) * mu * 2 / s;
    const Scalar dt_adv = Scalar(0.25) * dxi * s / std::max(rate, Scalar(1e-12));
    const Scalar dt_react = Scalar(0.25) / rate_bound;
    const long k = std::max<long>(1, static_cast<long>(std::ceil(prm.dt / std::min(dt_adv, dt_react))));
    if (k > 4096) throw std::runtime_error("fb_evolve_double: stability substepping exploded");
    for (long sstep = 0; sstep < k; ++sstep) imex_step(prm.dt / Scalar(k));
    record();
    if (step % stride == 0 || step == n_steps) snapshot();
  }
  return traj;
}

enum class Verdict { Spreading, Vanishing, Undetermined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Spreading: return "Spreading";
    case Verdict::Vanishing: return "Vanishing";
    default: return "Undetermined";
  }
}

template <typename Scalar>
struct ClassifyOptions {
  Scalar vanish_tol = 1e-4;
  Scalar plateau_tol = 1e-5;
  Scalar lstar_slack = 1.05;
  Scalar spread_tol = -1;  // auto: 0.1 * min V*
  Scalar window_fraction = 0.1;
  Scalar min_horizon = 10;
};

template <typename Scalar>
struct ClassificationOutcome {
  Verdict verdict = Verdict::Undetermined;
  Scalar h_final = 0;
  Scalar u_sup_final = 0;
  // evidence
  Scalar lstar = 0;
  Scalar width_final = 0;
  Scalar front_rate_final = 0;
  Scalar window_depth = 0;
  Scalar vanish_tol = 0, spread_tol = 0, plateau_tol = 0;
  bool slack_binding = false;  // vanishing verdict that leaned on the l* slack
};

/// Finite-horizon verdict for the asymptotic dichotomy.  Vanishing needs a
/// plateaued front inside the critical length (with declared slack) and a
/// decayed profile; spreading needs a front well past the critical length
/// and a profile staying deep over the initial core.  Anything else is
/// Undetermined and the caller extends the horizon.
template <typename Scalar>
ClassificationOutcome<Scalar> classify(const FrontTrajectory<Scalar>& traj, Scalar lstar, Scalar min_vstar,
                                       const ClassifyOptions<Scalar>& opts = {}) {
  ClassificationOutcome<Scalar> out;
  out.lstar = lstar;
  out.vanish_tol = opts.vanish_tol;
  out.plateau_tol = opts.plateau_tol;
  out.spread_tol = opts.spread_tol > 0 ? opts.spread_tol : Scalar(0.1) * min_vstar;
  out.h_final = traj.h.back();
  out.u_sup_final = traj.u_sup.back();
  out.width_final = traj.width_final();
  out.front_rate_final = std::max(std::abs(traj.h_dot.back()), std::abs(traj.g_dot.back()));
  if (traj.horizon() < opts.min_horizon) return out;

  const Scalar width0 = traj.h.front() - traj.g.front();

  // depth of the profile over the initial core, min over the trailing window
  const Scalar t_from = traj.horizon() * (1 - opts.window_fraction);
  Scalar depth = std::numeric_limits<Scalar>::infinity();
  for (const auto& s : traj.snapshots) {
    if (s.t < t_from) continue;
    for (int j = 0; j <= 16; ++j) {
      const Scalar x = traj.mode == FrontMode::Single ? traj.h0 * Scalar(j) / 16
                                                      : traj.g0 + (traj.h0 - traj.g0) * Scalar(j) / 16;
      depth = std::min(depth, snapshot_value_at(s, traj.mode, x));
    }
  }
  out.window_depth = depth;

  const bool plateaued = out.front_rate_final < opts.plateau_tol;
  if (plateaued && out.width_final <= lstar * opts.lstar_slack && out.u_sup_final < opts.vanish_tol) {
    out.verdict = Verdict::Vanishing;
    out.slack_binding = out.width_final > lstar;
    return out;
  }
  if (out.width_final > std::max(2 * lstar, width0 + 5) && depth > out.spread_tol) {
    out.verdict = Verdict::Spreading;
    return out;
  }
  return out;
}

enum class FrontSide { Right, Left };

/// Least-squares front speed over the trailing window of a spreading run.
template <typename Scalar>
SpeedEstimate<Scalar> front_speed(const FrontTrajectory<Scalar>& traj, const ClassificationOutcome<Scalar>& outcome,
                                  Scalar window_fraction = Scalar(0.4), FrontSide side = FrontSide::Right) {
  if (outcome.verdict != Verdict::Spreading)
    throw std::invalid_argument("front_speed: requires a Spreading trajectory, got " + to_string(outcome.verdict));
  const Scalar t_from = traj.horizon() * (1 - window_fraction);
  Scalar st = 0, sy = 0, stt = 0, sty = 0;
  long n = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (traj.t[i] < t_from) continue;
    const Scalar y = side == FrontSide::Right ? traj.h[i] : -traj.g[i];
    st += traj.t[i];
    sy += y;
    stt += traj.t[i] * traj.t[i];
    sty += traj.t[i] * y;
    ++n;
  }
  if (n < 8) throw std::invalid_argument("front_speed: window holds too few samples");
  const Scalar det = Scalar(n) * stt - st * st;
  SpeedEstimate<Scalar> est;
  est.value = (Scalar(n) * sty - st * sy) / det;
  est.intercept = (sy - est.value * st) / Scalar(n);
  Scalar rss = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (traj.t[i] < t_from) continue;
    const Scalar y = side == FrontSide::Right ? traj.h[i] : -traj.g[i];
    const Scalar r = y - (est.intercept + est.value * traj.t[i]);
    rss += r * r;
  }
  est.rms_residual = std::sqrt(rss / Scalar(n));
  est.endpoint_ratio = (side == FrontSide::Right ? traj.h.back() : -traj.g.back()) / traj.t.back();
  est.window_begin = t_from;
  est.window_end = traj.horizon();
  est.method = "front_slope";
  return est;
}

template <typename Scalar>
struct MassResidual {
  std::vector<Scalar> t, r;
  /// Sup over t >= t_min; the first instants sit in the startup layer of
  /// the discretization where the centered time difference straddles the
  /// corner of the initial data, so refinement studies skip them.
  Scalar sup_norm(Scalar t_min = 0) const {
    Scalar m = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (t[i] >= t_min) m = std::max(m, std::abs(r[i]));
    return m;
  }
};

/// Discrete residual of the integral identity
///     d/dt int u dx = -h'/mu (+ g'/mu) + int u f(t,u) dx,
/// which the Stefan and lateral boundary conditions enforce for the PDE.
template <typename Scalar>
MassResidual<Scalar> mass_balance_residual(const FrontTrajectory<Scalar>& traj) {
  MassResidual<Scalar> out;
  const Scalar dt = traj.dt;
  for (std::size_t i = 1; i + 1 < traj.t.size(); ++i) {
    const Scalar dmass = (traj.mass[i + 1] - traj.mass[i - 1]) / (2 * dt);
    Scalar r = dmass + traj.h_dot[i] / traj.mu - traj.int_uf[i];
    if (traj.mode == FrontMode::Double) r -= traj.g_dot[i] / traj.mu;
    out.t.push_back(traj.t[i]);
    out.r.push_back(r);
  }
  return out;
}

template <typename Scalar>
struct CriticalMuProbe {
  Scalar mu = 0;
  Verdict verdict = Verdict::Undetermined;
  Scalar horizon_used = 0;
};

template <typename Scalar>
struct CriticalMuResult {
  Scalar mu_lo = 0, mu_hi = 0;
  bool converged = false;
  std::vector<CriticalMuProbe<Scalar>> probes;
};

template <typename Scalar>
struct CriticalMuParams {
  FrontParams<Scalar> front;
  ClassifyOptions<Scalar> classify_opts;
  Scalar lstar = 0;       // critical length for the double-front dichotomy
  Scalar min_vstar = 0;   // inf of the attracting kinetic state
  Scalar rel_width = 0.05;
  int horizon_cap_factor = 8;  // near-threshold probes double the horizon up to this
};

/// Bisection in log(mu) for the threshold between vanishing and spreading
/// of the double-front problem, with verified bracket ends.  Undetermined
/// probes double the horizon up to the cap; if the cap is hit the result is
/// returned unconverged with the bracket reached so far.
template <typename Scalar, typename Profile>
CriticalMuResult<Scalar> critical_mu(const ReactionModel<Scalar>& m, const Profile& u0, Scalar g0, Scalar h0,
                                     std::pair<Scalar, Scalar> bracket, const CriticalMuParams<Scalar>& prm) {
  if (!(bracket.first > 0 && bracket.second > bracket.first))
    throw std::invalid_argument("critical_mu: bad bracket");
  if (!(h0 - g0 < prm.lstar))
    throw std::invalid_argument("critical_mu: initial width must be below the critical length, else spreading is forced");

  CriticalMuResult<Scalar> out;
  const auto probe = [&](Scalar mu) {
    FrontParams<Scalar> fp = prm.front;
    for (int j = 0;; ++j) {
      const auto traj = fb_evolve_double(m, mu, u0, g0, h0, fp);
      const auto verdict = classify(traj, prm.lstar, prm.min_vstar, prm.classify_opts).verdict;
      if (verdict != Verdict::Undetermined || (1 << (j + 1)) > prm.horizon_cap_factor) {
        out.probes.push_back({mu, verdict, fp.horizon});
        return verdict;
      }
      fp.horizon *= 2;
    }
  };

  if (probe(bracket.first) != Verdict::Vanishing)
    throw std::invalid_argument("critical_mu: lower bracket end does not vanish");
  if (probe(bracket.second) != Verdict::Spreading)
    throw std::invalid_argument("critical_mu: upper bracket end does not spread");

  Scalar lo = bracket.first, hi = bracket.second;
  while (hi - lo > prm.rel_width * (hi + lo) / 2) {
    const Scalar mid = std::sqrt(lo * hi);
    const Verdict v = probe(mid);
    if (v == Verdict::Undetermined) {
      out.mu_lo = lo;
      out.mu_hi = hi;
      return out;  // horizon cap exceeded; report the bracket reached
    }
    (v == Verdict::Vanishing ? lo : hi) = mid;
  }
  out.mu_lo = lo;
  out.mu_hi = hi;
  out.converged = true;
  return out;
}

}  // namespace fbkpp
