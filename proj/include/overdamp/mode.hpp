#pragma once

// Per-frequency analysis engine.  Integrates the Fourier-mode ODEs of the two
// damped wave equations and of the coupled linearized system, classifies
// phase-time zones, and exposes the per-mode Fourier multipliers.
//
// The mode systems, written on the state (a, b_comp):
//   coupled : a' = -xi * b_comp,          b_comp' = xi * a - b(t) * b_comp
//   wave_v  : a' = b_comp,                b_comp' = -xi^2 a - b(t) b_comp
//   wave_u  : a' = b_comp,                b_comp' = -(xi^2 + b'(t)) a - b(t) b_comp
// All three have trace -b(t), so the fundamental matrix satisfies
// det G(t,s) = exp(-int_s^t b).

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "overdamp/damping.hpp"

namespace overdamp {

enum class ModeSystem { coupled, wave_v, wave_u };
enum class WaveKind { v, u };

inline const char* to_string(ModeSystem s) {
  switch (s) {
    case ModeSystem::coupled: return "coupled";
    case ModeSystem::wave_v: return "wave_v";
    default: return "wave_u";
  }
}

struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 zero() { return {0, 0, 0, 0}; }

  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  double det() const { return a11 * a22 - a12 * a21; }
  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)),
                    std::max(std::abs(a21), std::abs(a22)));
  }
};

using cplx = std::complex<double>;

struct Mat2c {
  cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};
  static Mat2c identity() { return {}; }
  Mat2c operator*(const Mat2c& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Mat2c operator-(const Mat2c& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  cplx det() const { return a11 * a22 - a12 * a21; }
  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)),
                    std::max(std::abs(a21), std::abs(a22)));
  }
};

struct ModeState {
  double xi_mag = 0.0;
  std::complex<double> a{1.0, 0.0};       // v_hat, or the wave value y
  std::complex<double> b_comp{0.0, 0.0};  // u_hat, or dy/dt
  double t = 0.0;
};

// Symbol m(t,xi) of the Liouville-transformed wave equations:
//   m_v = xi^2 - b^2/4 - b'/2,   m_u = xi^2 - b^2/4 + b'/2.
inline double m_symbol(WaveKind kind, const DampingSpec& spec, double t,
                       double xi_mag) {
  const double b = b_of_t(spec, t);
  const double bp = b_deriv(spec, t, 1);
  const double base = xi_mag * xi_mag - 0.25 * b * b;
  return kind == WaveKind::v ? base - 0.5 * bp : base + 0.5 * bp;
}

// ---------------------------------------------------------------------------
// Zone partition of the phase-time plane.

enum class ZoneLabel { Hyp, Pd, Red, Ell, BoundedRemainder };

inline const char* to_string(ZoneLabel z) {
  switch (z) {
    case ZoneLabel::Hyp: return "Hyp";
    case ZoneLabel::Pd: return "Pd";
    case ZoneLabel::Red: return "Red";
    case ZoneLabel::Ell: return "Ell";
    default: return "BoundedRemainder";
  }
}

struct ZonePartition {
  double eps = 0.125;  // small zone constant
  double big_n = 2.0;  // hyperbolic threshold, > eps
  double t_ell = 0.0;  // elliptic zone opens at this time
  double c0 = 0.25;    // low-frequency radius, in (0, mu/2)

  // Reproducible defaults: eps = 1/8, N = 2, c0 = mu/4, and t_ell as the
  // first time with b'(t)/b(t)^2 <= 1/4 (the smallness the elliptic-zone
  // asymptotics need), solvable in closed form.
  static ZonePartition defaults(const DampingSpec& spec) {
    ZonePartition p;
    p.c0 = spec.mu / 4.0;
    const double al = -spec.lambda;  // |lambda| for lambda < 0
    if (al > 0.0) {
      // b'/b^2 = |lambda|/mu * (1+t)^(lambda-1) <= 1/4.
      const double thresh = std::pow(4.0 * al / spec.mu, 1.0 / (1.0 - spec.lambda));
      p.t_ell = std::max(0.0, thresh - 1.0);
    }
    return p;
  }

  void validate(const DampingSpec& spec) const {
    if (!(eps > 0.0 && big_n > eps))
      throw std::invalid_argument("ZonePartition: need 0 < eps < N");
    if (!(c0 > 0.0 && c0 < spec.mu / 2.0))
      throw std::invalid_argument("ZonePartition: need 0 < c0 < mu/2");
    if (!(t_ell >= 0.0)) throw std::invalid_argument("ZonePartition: t_ell >= 0");
  }
};

// Exactly one label per point; boundary ties resolve in the order
// Hyp > Pd > Red > Ell.
inline ZoneLabel classify_zone(WaveKind kind, const DampingSpec& spec,
                               const ZonePartition& part, double t,
                               double xi_mag) {
  const double m = m_symbol(kind, spec, t, xi_mag);
  const double sq = std::sqrt(std::abs(m));
  const double b = b_of_t(spec, t);
  if (m >= 0.0 && sq >= part.big_n * b) return ZoneLabel::Hyp;
  if (m >= 0.0 && sq >= part.eps * b) return ZoneLabel::Pd;
  if (sq <= part.eps * b) return ZoneLabel::Red;
  if (m <= 0.0 && t >= part.t_ell) return ZoneLabel::Ell;
  return ZoneLabel::BoundedRemainder;
}

// Largest time at which the mode is still hyperbolic: the last root of
// m(t) = N^2 b(t)^2.  Returns nullopt when the mode never enters Z_hyp.
inline std::optional<double> hyperbolic_exit_time(WaveKind kind,
                                                  const DampingSpec& spec,
                                                  const ZonePartition& part,
                                                  double xi_mag) {
  if (!(xi_mag > 0.0))
    throw std::invalid_argument("hyperbolic_exit_time: xi_mag must be > 0");
  auto g = [&](double t) {
    return m_symbol(kind, spec, t, xi_mag) -
           part.big_n * part.big_n * b_of_t(spec, t) * b_of_t(spec, t);
  };
  // Geometric scan for the last sign change; b(t) -> infinity guarantees the
  // mode eventually leaves Z_hyp for lambda < 0.
  const double tau_end = std::log1p(1e20);
  const int per_unit = 24;
  const int n = static_cast<int>(tau_end * per_unit) + 1;
  double last_pos = -1.0, bracket_lo = 0.0, bracket_hi = -1.0;
  double prev_t = 0.0;
  double prev_g = g(0.0);
  if (prev_g >= 0.0) last_pos = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = std::expm1(tau_end * i / n);
    const double gt = g(t);
    if (gt >= 0.0) last_pos = t;
    if (prev_g >= 0.0 && gt < 0.0) {
      bracket_lo = prev_t;
      bracket_hi = t;  // keep the LAST downward crossing
    }
    prev_t = t;
    prev_g = gt;
  }
  if (last_pos < 0.0) return std::nullopt;
  if (bracket_hi < 0.0)
    throw std::runtime_error("hyperbolic_exit_time: no exit before t = 1e20");
  // Bisection in tau = log(1+t) to 1e-10 relative in (1+t).
  double lo = std::log1p(bracket_lo), hi = std::log1p(bracket_hi);
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (g(std::expm1(mid)) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::expm1(0.5 * (lo + hi));
}

// ---------------------------------------------------------------------------
// Frozen-coefficient exponential stepping.

namespace detail {

// exp(M) for real 2x2 M.  With theta^2 = tr^2/4 - det M and eigenvalues
// x+- = tr/2 +- theta, the real-eigenvalue branch uses the spectral
// projectors,
//   exp(M) = [e^{x+}(M - x- I) - e^{x-}(M - x+ I)] / (x+ - x-),
// which keeps the two exponential scales separated (the mixed alpha/beta
// form loses e^{x-} to cancellation once the scales differ).  The slow
// exponent is evaluated as det M / (other root) so the stiff regime has no
// cancellation; M_ii - x-\/+ reduces to x+\/- - M_jj (j != i), exact in the
// stored values.
struct Exp2 {
  Mat2 e;
  double logdet;  // x+ + x- (= tr in exact arithmetic)
};

inline Exp2 expm2(const Mat2& m) {
  const double tr = m.a11 + m.a22;
  const double det = m.det();
  const double disc = 0.25 * tr * tr - det;
  Exp2 out;
  out.logdet = tr;
  if (disc > 1e-10 * std::max(1.0, 0.0625 * tr * tr)) {
    const double theta = std::sqrt(disc);
    double xp, xm;
    if (tr < 0.0) {
      xm = 0.5 * tr - theta;
      xp = det / xm;
    } else {
      xp = 0.5 * tr + theta;
      xm = (xp != 0.0) ? det / xp : 0.5 * tr - theta;
    }
    const double ep = std::exp(xp);
    const double em = std::exp(xm);
    const double inv = 1.0 / (xp - xm);
    out.e = {(ep * (xp - m.a22) - em * (xm - m.a22)) * inv,
             (ep - em) * inv * m.a12, (ep - em) * inv * m.a21,
             (ep * (xp - m.a11) - em * (xm - m.a11)) * inv};
    out.logdet = xp + xm;
  } else if (disc < -1e-10 * std::max(1.0, 0.0625 * tr * tr)) {
    const double phi = std::sqrt(-disc);
    const double s = std::exp(0.5 * tr);
    const double alpha = s * std::cos(phi);
    const double beta = s * std::sin(phi) / phi;
    const double sh = 0.5 * tr;
    out.e = {alpha + beta * (m.a11 - sh), beta * m.a12, beta * m.a21,
             alpha + beta * (m.a22 - sh)};
  } else {
    // Near-degenerate eigenvalues: series in theta^2 around the confluent
    // exponential, exp(M) = e^{tr/2}(cosh(theta) I + sinhc(theta) N).
    const double s = std::exp(0.5 * tr);
    const double t2 = disc;
    const double alpha = s * (1.0 + t2 / 2.0 + t2 * t2 / 24.0);
    const double beta = s * (1.0 + t2 / 6.0 + t2 * t2 / 120.0);
    const double sh = 0.5 * tr;
    out.e = {alpha + beta * (m.a11 - sh), beta * m.a12, beta * m.a21,
             alpha + beta * (m.a22 - sh)};
  }
  return out;
}

// Generator of one frozen step [t0, t1], with the time-dependent entries
// replaced by their exact averages over the step; the step exponential then
// equals exp(int_{t0}^{t1} A), the first Magnus approximant.
inline Mat2 step_generator(ModeSystem sys, const DampingSpec& spec, double xi,
                           double t0, double t1) {
  const double h = t1 - t0;
  const double bbar = damping_integral(spec, t0, t1) / h;
  switch (sys) {
    case ModeSystem::coupled:
      return {0.0, -xi * h, xi * h, -bbar * h};
    case ModeSystem::wave_v:
      return {0.0, h, -xi * xi * h, -bbar * h};
    default: {  // wave_u: average of b' over the step is (b(t1)-b(t0))/h
      const double bp_avg = (b_of_t(spec, t1) - b_of_t(spec, t0)) / h;
      return {0.0, h, -(xi * xi + bp_avg) * h, -bbar * h};
    }
  }
}

}  // namespace detail

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-13;
  double tau_init = 1e-3;   // initial step in tau = log(1+t)
  double tau_max = 0.2;     // step cap in tau
  double tau_min = 1e-14;   // underflow guard
  double dead_norm = 1e-280;  // below this the mode is flushed to zero
};

struct IntegrationStats {
  long steps = 0;
  long rejected = 0;
  // Determinant-law defects |det G * e^{int b} - 1|, each tracked on the
  // window where the quantity is resolvable in doubles: the entry-wise
  // determinant up to int b <= 20 (beyond that det G sits below the rounding
  // floor eps*||G||^2), the log-space bookkeeping up to int b <= 1e8 (beyond
  // that the defect is dominated by rounding of the exponents themselves).
  double det_defect_entry = 0.0;
  double det_defect_log = 0.0;
  bool mode_died = false;  // flushed to zero after super-exponential decay
};

// Propagates the fundamental matrix G(t, s) of the chosen mode system and
// records it at the requested times (sorted, all >= s).  Stepping is adaptive
// in tau = log(1+t) with step-doubling error control; each step advances by
// the closed-form exponential of the averaged generator.
struct ModePropagation {
  std::vector<Mat2> at_times;
  IntegrationStats stats;
};

inline ModePropagation propagate_mode(ModeSystem sys, const DampingSpec& spec,
                                      double xi, double s,
                                      std::span<const double> record_times,
                                      const StepControl& ctl = {}) {
  for (std::size_t i = 0; i < record_times.size(); ++i) {
    if (record_times[i] < s || (i > 0 && record_times[i] < record_times[i - 1]))
      throw std::invalid_argument("propagate_mode: record times must be sorted and >= s");
  }
  ModePropagation out;
  out.at_times.reserve(record_times.size());
  Mat2 g = Mat2::identity();
  double logdet = 0.0;
  double t = s;
  double tau_step = ctl.tau_init;
  bool dead = false;

  auto check_det = [&](double tcur) {
    const double ib = damping_integral(spec, s, tcur);
    if (dead) return;
    if (ib <= 20.0) {
      const double defect = std::abs(g.det() * std::exp(ib) - 1.0);
      out.stats.det_defect_entry = std::max(out.stats.det_defect_entry, defect);
    }
    if (ib <= 1e8) {
      const double defect = std::abs(std::expm1(logdet + ib));
      out.stats.det_defect_log = std::max(out.stats.det_defect_log, defect);
    }
  };

  for (double t_rec : record_times) {
    while (t < t_rec) {
      if (dead) {
        t = t_rec;
        break;
      }
      double h = (1.0 + t) * std::expm1(std::min(tau_step, ctl.tau_max));
      bool hit_record = false;
      if (t + h >= t_rec) {
        h = t_rec - t;
        hit_record = true;
      }
      if (h <= 0.0) break;
      const double t1 = t + h;
      const double tm = t + 0.5 * h;
      auto full = detail::expm2(detail::step_generator(sys, spec, xi, t, t1));
      auto h1 = detail::expm2(detail::step_generator(sys, spec, xi, t, tm));
      auto h2 = detail::expm2(detail::step_generator(sys, spec, xi, tm, t1));
      const Mat2 fine = h2.e * h1.e;
      const Mat2 coarse_g = full.e * g;
      const Mat2 fine_g = fine * g;
      double err = 0.0;
      err = std::max(err, std::abs(coarse_g.a11 - fine_g.a11));
      err = std::max(err, std::abs(coarse_g.a12 - fine_g.a12));
      err = std::max(err, std::abs(coarse_g.a21 - fine_g.a21));
      err = std::max(err, std::abs(coarse_g.a22 - fine_g.a22));
      const double scale = ctl.atol + ctl.rtol * std::max(fine_g.max_abs(), 1.0);
      const double ratio = err / scale;
      if (ratio <= 1.0) {
        g = fine_g;
        logdet += h1.logdet + h2.logdet;
        t = t1;
        out.stats.steps++;
        if (!(g.max_abs() < 1e100))
          throw std::runtime_error("propagate_mode: overflow at t=" +
                                   std::to_string(t) + " xi=" + std::to_string(xi));
        if (g.max_abs() < ctl.dead_norm) {
          g = Mat2::zero();
          dead = true;
          out.stats.mode_died = true;
        }
        const double grow = ratio > 0.0 ? 0.85 * std::pow(ratio, -1.0 / 3.0) : 4.0;
        if (!hit_record) tau_step = std::min(ctl.tau_max, tau_step * std::min(4.0, std::max(0.2, grow)));
      } else {
        out.stats.rejected++;
        tau_step *= std::max(0.1, 0.85 * std::pow(ratio, -1.0 / 3.0));
        if (tau_step < ctl.tau_min)
          throw std::runtime_error("propagate_mode: step underflow at t=" +
                                   std::to_string(t) + " xi=" + std::to_string(xi));
      }
    }
    check_det(t_rec);
    out.at_times.push_back(g);
  }
  return out;
}

// Advances a single mode state from s to t.  The fundamental matrix is real;
// complex initial data evolve componentwise.
inline ModeState integrate_mode(ModeSystem sys, const DampingSpec& spec,
                                double xi_mag, double s, double t,
                                const ModeState& init,
                                const StepControl& ctl = {}) {
  if (t < s) throw std::invalid_argument("integrate_mode: t >= s required");
  const double times[1] = {t};
  auto prop = propagate_mode(sys, spec, xi_mag, s, times, ctl);
  const Mat2& g = prop.at_times[0];
  ModeState st;
  st.xi_mag = xi_mag;
  st.t = t;
  st.a = g.a11 * init.a + g.a12 * init.b_comp;
  st.b_comp = g.a21 * init.a + g.a22 * init.b_comp;
  return st;
}

// Per-mode Fourier multipliers of a damped wave equation: the evolution of
// data (1,0) and (0,1) in (y, dy/dt), read off the first row of the
// fundamental matrix.
struct MultiplierSample {
  std::complex<double> phi1{1.0, 0.0};
  std::complex<double> phi2{0.0, 0.0};
  ModeSystem system = ModeSystem::wave_v;
  double s = 0.0;
  double t = 0.0;
  double xi_mag = 0.0;
};

inline MultiplierSample compute_multipliers(ModeSystem sys,
                                            const DampingSpec& spec,
                                            double xi_mag, double s, double t,
                                            const StepControl& ctl = {}) {
  if (sys == ModeSystem::coupled)
    throw std::invalid_argument("compute_multipliers: wave systems only");
  const double times[1] = {t};
  auto prop = propagate_mode(sys, spec, xi_mag, s, times, ctl);
  MultiplierSample m;
  m.phi1 = prop.at_times[0].a11;
  m.phi2 = prop.at_times[0].a12;
  m.system = sys;
  m.s = s;
  m.t = t;
  m.xi_mag = xi_mag;
  return m;
}

// Vorticity mode: w' = -b(t) w, solved exactly.
inline std::complex<double> vorticity_mode(const DampingSpec& spec, double s,
                                           double t,
                                           std::complex<double> w_init) {
  return w_init * std::exp(-damping_integral(spec, s, t));
}

}  // namespace overdamp
