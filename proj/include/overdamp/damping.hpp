#pragma once

// Scalar calculus of the damping coefficient b(t) = mu*(1+t)^(-lambda) and of
// the decay function Gamma(t,s) in which all decay envelopes are expressed.
// Everything here is closed-form; the rest of the library treats these values
// as exact.

#include <cmath>
#include <stdexcept>
#include <string>

namespace overdamp {

// Damping law b(t) = mu*(1+t)^(-lambda).  The over-damping regime has mu > 0
// and lambda in [-1, 0); lambda = -1 is the critical case with its own
// logarithmic branch everywhere downstream.
struct DampingSpec {
  double mu = 1.0;
  double lambda = -0.5;

  // Validated constructor for the over-damping regime.
  static DampingSpec checked(double mu, double lambda) {
    if (!(mu > 0.0)) throw std::invalid_argument("DampingSpec: mu must be > 0");
    if (!(lambda >= -1.0 && lambda < 0.0))
      throw std::invalid_argument("DampingSpec: lambda must be in [-1, 0)");
    return DampingSpec{mu, lambda};
  }

  // Unvalidated factory for test modes (mu = 0 undamped oscillator) and
  // cross-check passthrough (lambda >= 0).  Not part of the verified regime.
  static DampingSpec unchecked(double mu, double lambda) {
    return DampingSpec{mu, lambda};
  }

  bool critical() const { return lambda == -1.0; }
};

inline double log_time(double t) { return std::log1p(t); }
inline double from_log_time(double tau) { return std::expm1(tau); }

inline double b_of_t(const DampingSpec& spec, double t) {
  return spec.mu * std::pow(1.0 + t, -spec.lambda);
}

// j-th time derivative of b:  mu * prod_{i<j}(-lambda-i) * (1+t)^(-lambda-j).
inline double b_deriv(const DampingSpec& spec, double t, int order) {
  double coef = spec.mu;
  for (int i = 0; i < order; ++i) coef *= (-spec.lambda - i);
  return coef * std::pow(1.0 + t, -spec.lambda - order);
}

namespace detail {

// ((1+t)^a - (1+s)^a) / a, evaluated as (1+s)^a * expm1(a*(L_t - L_s)) / a
// with L = log1p.  This form has no cancellation, so it stays accurate
// through the guard band |a| < 1e-6 where the naive difference loses all
// digits (a = 1+lambda near the critical case).
inline double pow_diff_over_a(double a, double s, double t) {
  const double dl = std::log1p(t) - std::log1p(s);
  if (a == 0.0) return dl;  // limit a -> 0
  return std::pow(1.0 + s, a) * std::expm1(a * dl) / a;
}

}  // namespace detail

// Integral of b over [s, t]:  mu * ((1+t)^(1-lambda) - (1+s)^(1-lambda)) / (1-lambda).
inline double damping_integral(const DampingSpec& spec, double s, double t) {
  return spec.mu * detail::pow_diff_over_a(1.0 - spec.lambda, s, t);
}

// Integral of 1/b over [s, t].  Critical case: log((1+t)/(1+s)) / mu.
inline double inverse_damping_integral(const DampingSpec& spec, double s, double t) {
  if (spec.critical()) return (std::log1p(t) - std::log1p(s)) / spec.mu;
  return detail::pow_diff_over_a(1.0 + spec.lambda, s, t) / spec.mu;
}

// Decay function value together with its arguments; value = 1 iff t = s.
struct GammaValue {
  double value = 1.0;
  double t = 0.0;
  double s = 0.0;
};

// Gamma(t,s)^(-2), the bracket of the decay function.  Kept separate so the
// identity bracket = 1 + mu*(1+lambda)*int_s^t 1/b (resp. + mu*int 1/b at
// lambda = -1) is available exactly.
inline double gamma_bracket(const DampingSpec& spec, double s, double t) {
  if (spec.critical()) return 1.0 + (std::log1p(t) - std::log1p(s));
  const double a = 1.0 + spec.lambda;
  return 1.0 + a * detail::pow_diff_over_a(a, s, t);
}

inline GammaValue gamma(const DampingSpec& spec, double s, double t) {
  return GammaValue{1.0 / std::sqrt(gamma_bracket(spec, s, t)), t, s};
}

inline double gamma_of(const DampingSpec& spec, double s, double t) {
  return gamma(spec, s, t).value;
}

}  // namespace overdamp
