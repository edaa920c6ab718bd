#pragma once

// Principal Lyapunov exponents of the linear parabolic problems
//
//     v_t = v_xx + a(t) v,             v_x(t,0) = v(t,l) = 0,
//     v_t = v_xx - gamma v_x + a(t) v, v(t,0)  = v(t,l) = 0,
//
// by normalized long-time evolution.  Because a is space independent it
// acts as the exact scalar factor exp(integral a) which never changes the
// normalized profile; its contribution to the exponent is therefore the
// exact mean of a, and the evolution only has to measure the decay rate of
// the drift-diffusion part.  That part is stepped with TR-BDF2: L-stable,
// so under-resolved stiff modes cannot masquerade as the slowest decay, and
// second order in time so the exponent error is O(dt^2) + O(dx^2).
//
// The profile is renormalized to unit sup-norm once per unit time and the
// per-interval log-norms are accumulated; the estimate is their average.

#include "fbkpp/forcing.hpp"
#include "fbkpp/tridiag.hpp"
#include "fbkpp/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fbkpp {

template <typename Scalar>
struct LinearCoefficient {
  TrigPolynomial<Scalar> a;
};

template <typename Scalar>
struct LyapunovEstimate {
  Scalar value = 0;
  Scalar horizon = 0;
  std::vector<Scalar> growth_log;  // one entry per renormalization interval
  bool converged = false;
};

namespace detail {

// One TR-BDF2 step family for a constant tridiagonal operator L.
template <typename Scalar>
struct TrBdf2 {
  static constexpr double kGamma = 0.58578643762690495119831127579;  // 2 - sqrt(2)

  Vector<Scalar> l_sub, l_diag, l_sup;      // operator
  Vector<Scalar> m1_sub, m1_diag, m1_sup;   // I - (g*dt/2) L
  Vector<Scalar> m2_sub, m2_diag, m2_sup;   // I - ((1-g)/(2-g)) dt L
  Scalar dt = 0;

  void configure(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& sup, Scalar step) {
    l_sub = sub;
    l_diag = diag;
    l_sup = sup;
    dt = step;
    const Scalar g = Scalar(kGamma);
    const Scalar c1 = g * dt / 2;
    const Scalar c2 = (1 - g) / (2 - g) * dt;
    m1_sub = -c1 * sub;
    m1_diag = (Scalar(1) - c1 * diag.array()).matrix();
    m1_sup = -c1 * sup;
    m2_sub = -c2 * sub;
    m2_diag = (Scalar(1) - c2 * diag.array()).matrix();
    m2_sup = -c2 * sup;
  }

  void step(Vector<Scalar>& v, Vector<Scalar>& work, Vector<Scalar>& scratch) const {
    const Scalar g = Scalar(kGamma);
    apply_tridiagonal(l_sub, l_diag, l_sup, v, work);
    Vector<Scalar> stage = v + (g * dt / 2) * work;
    solve_tridiagonal(m1_sub, m1_diag, m1_sup, stage, scratch);
    Vector<Scalar> rhs = (Scalar(1) / (g * (2 - g))) * stage - ((1 - g) * (1 - g) / (g * (2 - g))) * v;
    solve_tridiagonal(m2_sub, m2_diag, m2_sup, rhs, scratch);
    v = rhs;
  }
};

template <typename Scalar>
LyapunovEstimate<Scalar> lyapunov_run(const TrigPolynomial<Scalar>& a, const Vector<Scalar>& l_sub,
                                      const Vector<Scalar>& l_diag, const Vector<Scalar>& l_sup, Vector<Scalar> seed,
                                      Scalar horizon, Scalar dt, Scalar tol) {
  const long intervals = std::lround(double(horizon));
  if (intervals < 4) throw std::invalid_argument("lyapunov: horizon must cover at least 4 renormalization intervals");
  const long substeps = static_cast<long>(std::ceil(Scalar(1) / dt));
  const Scalar dt_eff = Scalar(1) / Scalar(substeps);

  TrBdf2<Scalar> scheme;
  scheme.configure(l_sub, l_diag, l_sup, dt_eff);

  const Scalar mean_a = ap_mean(a);
  Vector<Scalar> v = seed / seed.cwiseAbs().maxCoeff();
  Vector<Scalar> work, scratch;

  LyapunovEstimate<Scalar> est;
  est.horizon = Scalar(intervals);
  est.growth_log.reserve(static_cast<std::size_t>(intervals));
  for (long k = 0; k < intervals; ++k) {
    for (long s = 0; s < substeps; ++s) scheme.step(v, work, scratch);
    const Scalar norm = v.cwiseAbs().maxCoeff();
    // the exact forcing factor exp(integral a) contributes its mean per unit
    est.growth_log.push_back(mean_a + std::log(norm));
    v /= norm;
  }

  Scalar total = 0;
  for (Scalar gl : est.growth_log) total += gl;
  est.value = total / Scalar(intervals);

  // convergence gate: running average over the trailing half varies < tol
  Scalar run = 0, lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
  for (long k = 0; k < intervals; ++k) {
    run += est.growth_log[static_cast<std::size_t>(k)];
    if (k + 1 >= (intervals + 1) / 2) {
      const Scalar avg = run / Scalar(k + 1);
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
  }
  est.converged = (hi - lo) < tol;
  return est;
}

}  // namespace detail

/// Exponent with v_x(0) = v(l) = 0.  Grid of N cells; unknowns sit at
/// x_i = i dx for i < N with a second-order ghost node at the Neumann end.
template <typename Scalar>
LyapunovEstimate<Scalar> lyapunov_nd(const LinearCoefficient<Scalar>& c, Scalar l, int N, Scalar horizon, Scalar dt,
                                     Scalar tol = Scalar(1e-4)) {
  if (N < 16) throw std::invalid_argument("lyapunov_nd: need at least 16 grid cells");
  const Scalar dx = l / Scalar(N);
  if (dt > dx) throw std::invalid_argument("lyapunov_nd: accuracy guard requires dt <= dx");
  const Scalar inv2 = Scalar(1) / (dx * dx);

  Vector<Scalar> sub(N - 1), diag(N), sup(N - 1);
  diag.setConstant(-2 * inv2);
  sub.setConstant(inv2);
  sup.setConstant(inv2);
  sup[0] = 2 * inv2;  // ghost node: v_{-1} = v_1

  Vector<Scalar> seed(N);
  for (int i = 0; i < N; ++i) seed[i] = std::cos(Scalar(M_PI) * Scalar(i) * dx / (2 * l));
  return detail::lyapunov_run(c.a, sub, diag, sup, seed, horizon, dt, tol);
}

/// Exponent with v(0) = v(l) = 0 and constant drift -gamma v_x (centered).
template <typename Scalar>
LyapunovEstimate<Scalar> lyapunov_dd_drift(const LinearCoefficient<Scalar>& c, Scalar gamma, Scalar l, int N,
                                           Scalar horizon, Scalar dt, Scalar tol = Scalar(1e-4)) {
  if (N < 16) throw std::invalid_argument("lyapunov_dd_drift: need at least 16 grid cells");
  if (gamma < Scalar(0)) throw std::invalid_argument("lyapunov_dd_drift: gamma must be nonnegative");
  const Scalar dx = l / Scalar(N);
  if (dt > dx) throw std::invalid_argument("lyapunov_dd_drift: accuracy guard requires dt <= dx");
  const Scalar inv2 = Scalar(1) / (dx * dx);
  const Scalar adv = gamma / (2 * dx);

  const int n = N - 1;  // interior unknowns x_1 .. x_{N-1}
  Vector<Scalar> sub(n - 1), diag(n), sup(n - 1);
  diag.setConstant(-2 * inv2);
  sub.setConstant(inv2 + adv);
  sup.setConstant(inv2 - adv);

  Vector<Scalar> seed(n);
  for (int i = 1; i <= n; ++i)
    seed[i - 1] = std::sin(Scalar(M_PI) * Scalar(i) * dx / l) * std::exp(gamma * Scalar(i) * dx / 2);
  return detail::lyapunov_run(c.a, sub, diag, sup, seed, horizon, dt, tol);
}

enum class CriticalKind { NeumannDirichlet, DirichletDrift };

template <typename Scalar>
struct CriticalLengthResult {
  Scalar l = 0;
  Scalar lambda = 0;
  int probes = 0;
};

/// Bisection for the domain length where the exponent changes sign,
/// exploiting monotonicity of the exponent in l.  Stops once |lambda| at the
/// midpoint drops below lambda_tol, with a hard probe cap.
template <typename Scalar>
CriticalLengthResult<Scalar> critical_length(const LinearCoefficient<Scalar>& c, CriticalKind kind, Scalar gamma,
                                             std::pair<Scalar, Scalar> bracket, int N = 200, Scalar horizon = Scalar(50),
                                             Scalar lambda_tol = Scalar(1e-4), int max_probes = 30) {
  if (!(ap_mean(c.a) > Scalar(0))) throw std::invalid_argument("critical_length: mean of a must be positive");
  int probes = 0;
  const auto lambda_at = [&](Scalar l) {
    ++probes;
    const Scalar dt = std::min(Scalar(5e-3), l / Scalar(N));
    return kind == CriticalKind::NeumannDirichlet ? lyapunov_nd(c, l, N, horizon, dt).value
                                                  : lyapunov_dd_drift(c, gamma, l, N, horizon, dt).value;
  };

  Scalar lo = bracket.first, hi = bracket.second;
  Scalar f_lo = lambda_at(lo), f_hi = lambda_at(hi);
  if (!(f_lo < Scalar(0) && f_hi > Scalar(0)))
    throw std::invalid_argument("critical_length: exponent does not change sign over the bracket");

  CriticalLengthResult<Scalar> out;
  while (probes < max_probes) {
    const Scalar mid = (lo + hi) / 2;
    const Scalar f_mid = lambda_at(mid);
    out.l = mid;
    out.lambda = f_mid;
    if (std::abs(f_mid) < lambda_tol) break;
    (f_mid < Scalar(0) ? lo : hi) = mid;
  }
  out.probes = probes;
  return out;
}

}  // namespace fbkpp
