#pragma once

// Time almost periodic forcing represented by finite trigonometric
// polynomials
//
//     p(t) = c0 + sum_k amp_k * sin(freq_k * t + phase_k),   freq_k > 0.
//
// Incommensurate frequencies (such as 1 and sqrt(2)) give genuinely
// non-periodic forcing while keeping the time mean, the translates and the
// sup/inf bounds exactly computable, which the solvers and their oracles
// rely on.  All types here are immutable values after construction.

#include "fbkpp/types.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbkpp {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

template <typename Scalar>
struct TrigMode {
  Scalar amplitude;
  Scalar frequency;
  Scalar phase;
};

namespace detail {
template <typename Scalar>
Scalar wrap_phase(Scalar phi) {
  Scalar w = std::fmod(phi, Scalar(kTwoPi));
  if (w < Scalar(0)) w += Scalar(kTwoPi);
  // fmod can land exactly on the period for negative inputs
  if (w >= Scalar(kTwoPi)) w = Scalar(0);
  return w;
}
}  // namespace detail

/// Finite trigonometric polynomial with strictly positive frequencies and
/// phases stored canonically in [0, 2*pi).
template <typename Scalar>
class TrigPolynomial {
 public:
  TrigPolynomial() : constant_(0) {}

  explicit TrigPolynomial(Scalar constant) : constant_(constant) {
    if (!std::isfinite(constant)) throw std::invalid_argument("TrigPolynomial: constant term must be finite");
  }

  TrigPolynomial(Scalar constant, const std::vector<TrigMode<Scalar>>& modes) : TrigPolynomial(constant) {
    const Eigen::Index n = static_cast<Eigen::Index>(modes.size());
    amp_.resize(n);
    freq_.resize(n);
    phase_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& m = modes[static_cast<std::size_t>(k)];
      if (!std::isfinite(m.amplitude)) throw std::invalid_argument("TrigPolynomial: amplitude must be finite");
      if (!(m.frequency > Scalar(0)) || !std::isfinite(m.frequency))
        throw std::invalid_argument("TrigPolynomial: frequency must be positive and finite");
      if (!std::isfinite(m.phase)) throw std::invalid_argument("TrigPolynomial: phase must be finite");
      amp_[k] = m.amplitude;
      freq_[k] = m.frequency;
      phase_[k] = detail::wrap_phase(m.phase);
    }
  }

  Scalar constant_term() const { return constant_; }
  Eigen::Index mode_count() const { return amp_.size(); }
  const Vector<Scalar>& amplitudes() const { return amp_; }
  const Vector<Scalar>& frequencies() const { return freq_; }
  const Vector<Scalar>& phases() const { return phase_; }

  Scalar operator()(Scalar t) const {
    if (amp_.size() == 0) return constant_;
    return constant_ + (amp_.array() * (freq_.array() * t + phase_.array()).sin()).sum();
  }

  /// c0 + sum |amp|; every value of p stays below this.
  Scalar upper_bound() const { return constant_ + amp_.cwiseAbs().sum(); }
  /// c0 - sum |amp|; every value of p stays above this.
  Scalar lower_bound() const { return constant_ - amp_.cwiseAbs().sum(); }
  /// sup_t |p(t)| <= |c0| + sum |amp|.
  Scalar abs_bound() const { return std::abs(constant_) + amp_.cwiseAbs().sum(); }

  /// Exact antiderivative: integral of p over [s, t], mode by mode.
  Scalar integral(Scalar s, Scalar t) const {
    Scalar total = constant_ * (t - s);
    for (Eigen::Index k = 0; k < amp_.size(); ++k)
      total += amp_[k] / freq_[k] * (std::cos(freq_[k] * s + phase_[k]) - std::cos(freq_[k] * t + phase_[k]));
    return total;
  }

 private:
  Scalar constant_;
  Vector<Scalar> amp_, freq_, phase_;
};

using TrigPoly = TrigPolynomial<double>;

template <typename Scalar>
Scalar ap_eval(const TrigPolynomial<Scalar>& p, Scalar t) {
  if (!std::isfinite(t)) throw std::invalid_argument("ap_eval: t must be finite");
  return p(t);
}

/// Exact time mean: every sinusoidal mode averages to zero.
template <typename Scalar>
Scalar ap_mean(const TrigPolynomial<Scalar>& p) {
  return p.constant_term();
}

/// Translate p(.) to p(. + tau); phases move by freq*tau mod 2*pi.
template <typename Scalar>
TrigPolynomial<Scalar> ap_translate(const TrigPolynomial<Scalar>& p, Scalar tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("ap_translate: tau must be finite");
  std::vector<TrigMode<Scalar>> modes;
  modes.reserve(static_cast<std::size_t>(p.mode_count()));
  for (Eigen::Index k = 0; k < p.mode_count(); ++k)
    modes.push_back({p.amplitudes()[k], p.frequencies()[k], p.phases()[k] + p.frequencies()[k] * tau});
  return TrigPolynomial<Scalar>(p.constant_term(), modes);
}

template <typename Scalar>
bool identical(const TrigPolynomial<Scalar>& p, const TrigPolynomial<Scalar>& q) {
  if (p.constant_term() != q.constant_term() || p.mode_count() != q.mode_count()) return false;
  for (Eigen::Index k = 0; k < p.mode_count(); ++k)
    if (p.amplitudes()[k] != q.amplitudes()[k] || p.frequencies()[k] != q.frequencies()[k] ||
        p.phases()[k] != q.phases()[k])
      return false;
  return true;
}

/// Logistic-type reaction f(t,u) = a(t) - b(t)*u with the bookkeeping the
/// solvers need: the analytic carrying bound M = sup a / inf b.
template <typename Scalar>
class ReactionModel {
 public:
  ReactionModel(TrigPolynomial<Scalar> growth, TrigPolynomial<Scalar> limitation)
      : a_(std::move(growth)), b_(std::move(limitation)) {
    const Scalar inf_b = b_.lower_bound();
    m_bound_ = inf_b > Scalar(0) ? a_.upper_bound() / inf_b : std::numeric_limits<Scalar>::quiet_NaN();
  }

  const TrigPolynomial<Scalar>& a() const { return a_; }
  const TrigPolynomial<Scalar>& b() const { return b_; }

  Scalar f(Scalar t, Scalar u) const { return a_(t) - b_(t) * u; }
  Scalar f_u(Scalar t) const { return -b_(t); }

  /// f(t,u) < 0 for every u >= m_bound() when the hypotheses hold.
  Scalar m_bound() const { return m_bound_; }

 private:
  TrigPolynomial<Scalar> a_, b_;
  Scalar m_bound_;
};

using Reaction = ReactionModel<double>;

/// Shift the growth coefficient by a constant: f(t,u) + eps.
template <typename Scalar>
ReactionModel<Scalar> with_growth_shift(const ReactionModel<Scalar>& m, Scalar eps) {
  std::vector<TrigMode<Scalar>> modes;
  for (Eigen::Index k = 0; k < m.a().mode_count(); ++k)
    modes.push_back({m.a().amplitudes()[k], m.a().frequencies()[k], m.a().phases()[k]});
  return ReactionModel<Scalar>(TrigPolynomial<Scalar>(m.a().constant_term() + eps, modes), m.b());
}

template <typename Scalar>
struct HypothesisReport {
  bool h1_ok = false;  // inf_t b > 0 and the carrying bound exists
  bool h3_ok = false;  // mean of the growth coefficient is positive
  Scalar mean_a = 0;
  Scalar inf_b_analytic = 0;  // authoritative lower bound c0 - sum|amp|
  Scalar inf_b_sampled = 0;   // dense sample, reported for information
  Scalar sup_a_analytic = 0;
  Scalar m_bound = 0;
  bool ok() const { return h1_ok && h3_ok; }
};

/// Check the monostability and positive-mean hypotheses.  The analytic
/// bound on inf b is authoritative; the sampled value over a long window is
/// reported alongside so near-degenerate models can be inspected.
template <typename Scalar>
HypothesisReport<Scalar> check_hypotheses(const ReactionModel<Scalar>& m, Scalar sample_step = Scalar(1e-3),
                                          Scalar sample_window = Scalar(1e3)) {
  HypothesisReport<Scalar> rep;
  rep.mean_a = ap_mean(m.a());
  rep.inf_b_analytic = m.b().lower_bound();
  rep.sup_a_analytic = m.a().upper_bound();

  Scalar inf_b = std::numeric_limits<Scalar>::infinity();
  if (m.b().mode_count() == 0) {
    inf_b = m.b().constant_term();
  } else {
    const long n = static_cast<long>(sample_window / sample_step);
    for (long i = 0; i <= n; ++i) inf_b = std::min(inf_b, m.b()(Scalar(i) * sample_step));
  }
  rep.inf_b_sampled = inf_b;

  rep.h1_ok = rep.inf_b_analytic > Scalar(0);
  rep.h3_ok = rep.mean_a > Scalar(0);
  rep.m_bound = m.m_bound();
  return rep;
}

// --- text form used by config files:  "c0 | amp:freq:phase, amp:freq:phase"

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string to_text(const TrigPoly& p) {
  std::string out = format_real(p.constant_term()) + " |";
  for (Eigen::Index k = 0; k < p.mode_count(); ++k) {
    out += k == 0 ? " " : ", ";
    out += format_real(p.amplitudes()[k]) + ":" + format_real(p.frequencies()[k]) + ":" + format_real(p.phases()[k]);
  }
  return out;
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& tok, const std::string& what) {
  const std::string t = trim(tok);
  if (t.empty()) throw std::invalid_argument("empty " + what);
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " '" + t + "'");
  }
  if (used != t.size()) throw std::invalid_argument("trailing junk in " + what + " '" + t + "'");
  return x;
}
}  // namespace detail

/// Parse "c0 | a:f:p, a:f:p".  A bare "c0" is accepted as a constant.
inline TrigPoly trig_poly_from_text(const std::string& text) {
  const auto bar = text.find('|');
  const double c0 = detail::parse_real(text.substr(0, bar), "constant term");
  std::vector<TrigMode<double>> modes;
  if (bar != std::string::npos) {
    std::string rest = detail::trim(text.substr(bar + 1));
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string item = detail::trim(rest.substr(0, comma));
      rest = comma == std::string::npos ? "" : detail::trim(rest.substr(comma + 1));
      if (item.empty()) throw std::invalid_argument("empty mode entry in trig polynomial");
      const auto c1 = item.find(':');
      const auto c2 = item.find(':', c1 == std::string::npos ? c1 : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("mode entry '" + item + "' is not amp:freq:phase");
      modes.push_back({detail::parse_real(item.substr(0, c1), "amplitude"),
                       detail::parse_real(item.substr(c1 + 1, c2 - c1 - 1), "frequency"),
                       detail::parse_real(item.substr(c2 + 1), "phase")});
    }
  }
  return TrigPoly(c0, modes);
}

}  // namespace fbkpp
