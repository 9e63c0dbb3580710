#pragma once

// Convolution-integral asymptotics: the three-case classification of
//   int_0^t Gamma^beta(t,s) (1+s)^(-gamma) ds
// and of its critical-case analogue with logarithmic kernels, plus quadrature
// oracles that evaluate both integrals directly for empirical verification.

#include <cmath>
#include <stdexcept>

#include "overdamp/damping.hpp"
#include "overdamp/quadrature.hpp"

namespace overdamp {

enum class ConvCaseId { supercritical, critical, subcritical };

inline const char* to_string(ConvCaseId id) {
  switch (id) {
    case ConvCaseId::supercritical: return "supercritical";
    case ConvCaseId::critical: return "critical";
    default: return "subcritical";
  }
}

struct ConvolutionCase {
  double exponent = 0.0;   // power of (1+t)
  double log_power = 0.0;  // power of ln(e+t)
  bool loglog_flag = false;  // ln(ln(e^e+t)) growth marker
  ConvCaseId case_id = ConvCaseId::supercritical;
};

// Classification of int_0^t Gamma^beta(t,s)(1+s)^(-gamma) ds, lambda in (-1,0):
//   max{(1+lambda)beta/2, gamma} > 1 : (1+t)^(-min{(1+lambda)beta/2, gamma})
//   max = 1                          : same power times ln(e+t)
//   max < 1                          : (1+t)^(-gamma-(1+lambda)beta/2+1)
inline ConvolutionCase predict_convolution(double beta, double gamma_exp,
                                           double lambda) {
  if (!(beta > 0.0) || !(gamma_exp > 0.0))
    throw std::invalid_argument("predict_convolution: beta, gamma must be > 0");
  if (!(lambda > -1.0 && lambda < 0.0))
    throw std::invalid_argument("predict_convolution: lambda must be in (-1,0)");
  const double half = 0.5 * (1.0 + lambda) * beta;
  const double mx = std::max(half, gamma_exp);
  ConvolutionCase c;
  if (mx > 1.0 + 1e-12) {
    c.case_id = ConvCaseId::supercritical;
    c.exponent = -std::min(half, gamma_exp);
  } else if (mx >= 1.0 - 1e-12) {
    c.case_id = ConvCaseId::critical;
    c.exponent = -std::min(half, gamma_exp);
    c.log_power = 1.0;
  } else {
    c.case_id = ConvCaseId::subcritical;
    c.exponent = -gamma_exp - half + 1.0;
  }
  return c;
}

// Critical-case (lambda = -1) analogue:
//   int_0^t (1+ln((1+t)/(1+s)))^(-beta) (1+s)^(-1) |ln(e+s)|^(-gamma) ds
//   ~ |ln(e+t)|^(-min{beta, gamma-1})  for gamma > 1,
//     ln(ln(e^e+t))                    for gamma = 1,
//     |ln(e+t)|^(1-gamma)              for gamma < 1.
inline ConvolutionCase predict_log_convolution(double beta, double gamma_exp) {
  if (!(beta > 0.0) || !(gamma_exp > 0.0))
    throw std::invalid_argument("predict_log_convolution: beta, gamma must be > 0");
  ConvolutionCase c;
  c.exponent = 0.0;
  if (gamma_exp > 1.0 + 1e-12) {
    c.case_id = ConvCaseId::supercritical;
    c.log_power = -std::min(beta, gamma_exp - 1.0);
  } else if (gamma_exp >= 1.0 - 1e-12) {
    c.case_id = ConvCaseId::critical;
    c.loglog_flag = true;
  } else {
    c.case_id = ConvCaseId::subcritical;
    c.log_power = 1.0 - gamma_exp;
  }
  return c;
}

// Quadrature oracle for the algebraic lemma.  Works in sigma = ln(1+s) and
// splits at s = t/2, mirroring the proof's interval split: the integrand's
// mass sits near s = 0 on one side of criticality and near s = t on the
// other.
inline double quad_convolution(double beta, double gamma_exp, double lambda,
                               double t, double rel_tol = 1e-8) {
  if (!(t > 0.0)) throw std::invalid_argument("quad_convolution: t must be > 0");
  const DampingSpec spec = DampingSpec::unchecked(1.0, lambda);
  auto integrand_sigma = [&](double sigma) {
    const double s = std::expm1(sigma);
    const double g = gamma_of(spec, s, t);
    return std::pow(g, beta) * std::exp((1.0 - gamma_exp) * sigma);
  };
  const double sig_mid = std::log1p(0.5 * t);
  const double sig_end = std::log1p(t);
  QuadResult a = integrate_adaptive(integrand_sigma, 0.0, sig_mid, rel_tol);
  QuadResult b = integrate_adaptive(integrand_sigma, sig_mid, sig_end, rel_tol);
  if (!a.converged || !b.converged)
    throw std::runtime_error("quad_convolution: adaptive quadrature did not converge");
  return a.value + b.value;
}

// Quadrature oracle for the logarithmic lemma.  The early half integrates in
// sigma2 = ln ln(e+s) (where the kernel concentrates for gamma > 1); the late
// half in sigma = ln(1+s).
inline double quad_log_convolution(double beta, double gamma_exp, double t,
                                   double rel_tol = 1e-8) {
  if (!(t > 0.0))
    throw std::invalid_argument("quad_log_convolution: t must be > 0");
  auto raw = [&](double s) {
    const double lr = std::log1p(t) - std::log1p(s);
    return std::pow(1.0 + lr, -beta) / (1.0 + s) *
           std::pow(std::log(M_E + s), -gamma_exp);
  };
  const double s_mid = 0.5 * t;
  // s in [0, t/2] via sigma2 = ln ln(e+s), ds = (e+s) ln(e+s) dsigma2.
  auto integrand_lnln = [&](double sig2) {
    const double u = std::exp(sig2);     // u = ln(e+s)
    const double s = std::exp(u) - M_E;  // s >= 0
    return raw(s) * (M_E + s) * u;
  };
  const double sig2_lo = 0.0;  // s = 0 -> ln ln e = 0
  const double sig2_mid = std::log(std::log(M_E + s_mid));
  QuadResult a = integrate_adaptive(integrand_lnln, sig2_lo, sig2_mid, rel_tol);
  // s in [t/2, t] via sigma = ln(1+s).
  auto integrand_ln = [&](double sigma) {
    const double s = std::expm1(sigma);
    return raw(s) * (1.0 + s);
  };
  QuadResult b = integrate_adaptive(integrand_ln, std::log1p(s_mid),
                                    std::log1p(t), rel_tol);
  if (!a.converged || !b.converged)
    throw std::runtime_error("quad_log_convolution: adaptive quadrature did not converge");
  return a.value + b.value;
}

}  // namespace overdamp
