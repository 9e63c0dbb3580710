#pragma once

// Elliptic-zone asymptotics: the residual of the low-frequency first-order
// expansion of sqrt|m| + d_t sqrt|m| / (2 sqrt|m|) - b/2, and the one-step
// diagonalization of the mode system with its remainder matrix R1.  Both
// residuals decay like (1+t)^(lambda-2) along fixed low-frequency rays.

#include <cmath>
#include <stdexcept>

#include "overdamp/damping.hpp"
#include "overdamp/mode.hpp"

namespace overdamp {

namespace detail {

// |m|, |m|', |m|'' for m < 0, from the closed-form derivatives of b.
struct AbsM {
  double v, d1, d2;
};

inline AbsM abs_m_derivs(WaveKind kind, const DampingSpec& spec, double t,
                         double xi) {
  const double b = b_of_t(spec, t);
  const double b1 = b_deriv(spec, t, 1);
  const double b2 = b_deriv(spec, t, 2);
  const double b3 = b_deriv(spec, t, 3);
  const double sign = kind == WaveKind::v ? 1.0 : -1.0;
  AbsM m;
  m.v = 0.25 * b * b + sign * 0.5 * b1 - xi * xi;
  m.d1 = 0.5 * b * b1 + sign * 0.5 * b2;
  m.d2 = 0.5 * (b1 * b1 + b * b2) + sign * 0.5 * b3;
  return m;
}

}  // namespace detail

// d/dt sqrt|m(t,xi)| from closed forms; exposed for the finite-difference
// cross-check.
inline double sqrt_abs_m_deriv(WaveKind kind, const DampingSpec& spec,
                               double t, double xi_mag) {
  const auto m = detail::abs_m_derivs(kind, spec, t, xi_mag);
  if (!(m.v > 0.0))
    throw std::invalid_argument("sqrt_abs_m_deriv: requires m < 0 (elliptic zone)");
  return 0.5 * m.d1 / std::sqrt(m.v);
}

// |r(t,xi)| with
//   r = [sqrt|m| + d_t sqrt|m|/(2 sqrt|m|) - b/2]
//       - [-|xi|^2/(sqrt|m| + b/2) + (b'/b for the v system)].
// Evaluated in an algebraically identical cancellation-free arrangement: the
// naive bracket difference subtracts O(b) quantities to expose an
// O((1+t)^(lambda-2)) remainder, which drowns in rounding beyond t ~ 1e5.
inline double elliptic_residual(WaveKind kind, const DampingSpec& spec,
                                double t, double xi_mag) {
  const auto m = detail::abs_m_derivs(kind, spec, t, xi_mag);
  if (!(m.v > 0.0))
    throw std::invalid_argument("elliptic_residual: point outside the elliptic zone");
  const double b = b_of_t(spec, t);
  const double b1 = b_deriv(spec, t, 1);
  const double b2 = b_deriv(spec, t, 2);
  const double xi2 = xi_mag * xi_mag;
  const double h = std::sqrt(m.v);
  const double hb = h + 0.5 * b;
  if (kind == WaveKind::v) {
    // r = -(b'/2)(b'/2 - xi^2) / (b (h+b/2)^2)
    //     + (b b''/2 - b'^2 + 2 b' xi^2) / (4 b |m|).
    const double t1 = -(0.5 * b1) * (0.5 * b1 - xi2) / (b * hb * hb);
    const double t2 = (0.5 * b * b2 - b1 * b1 + 2.0 * b1 * xi2) / (4.0 * b * m.v);
    return std::abs(t1 + t2);
  }
  // u system: r = N / (4 |m| (h+b/2)) with
  //   N = (b b'/2)(-b'/2 - xi^2)/(h+b/2) + b'^2 + 2 b' xi^2 - (b''/2)(h+b/2).
  const double num = (0.5 * b * b1) * (-0.5 * b1 - xi2) / hb + b1 * b1 +
                     2.0 * b1 * xi2 - 0.5 * b2 * hb;
  return std::abs(num / (4.0 * m.v * hb));
}

struct DiagonalizationResidual {
  double identity_defect = 0.0;  // max-norm defect of the M-conjugation identity
  double r1_norm = 0.0;          // max-norm of the remainder matrix R1
};

// One diagonalization step in the elliptic zone of the v system.  With
// h = sqrt|m_v| and D_t = -i d_t:
//   A  = [[D_t h / h, h], [-h, 0]],    M = [[i,-i],[1,1]],
//   D  = diag(-ih, ih),                R = (D_t h / 2h) [[1,-1],[-1,1]],
//   N1 = I + (i D_t h / 2|m|) [[0,1],[-1,0]],   F0 = (D_t h / 2h) I,
//   R1 = -(N1)^{-1} (D_t N^(1) - R N^(1) + N^(1) F0).
inline DiagonalizationResidual diagonalization_residual(const DampingSpec& spec,
                                                        double t,
                                                        double xi_mag) {
  const auto m = detail::abs_m_derivs(WaveKind::v, spec, t, xi_mag);
  if (!(m.v > 0.0))
    throw std::invalid_argument(
        "diagonalization_residual: point outside the elliptic zone");
  const double h = std::sqrt(m.v);
  const double h1 = 0.5 * m.d1 / h;                         // h'
  const double h2 = 0.5 * m.d2 / h - 0.25 * m.d1 * m.d1 / (m.v * h);  // h''
  const cplx i{0.0, 1.0};
  const cplx dth = -i * h1;  // D_t h

  const Mat2c a{dth / h, cplx{h}, cplx{-h}, cplx{0.0}};
  const Mat2c bigm{i, -i, cplx{1.0}, cplx{1.0}};
  const cplx r = dth / (2.0 * h);
  const Mat2c d_plus_r{-i * h + r, -r, -r, i * h + r};

  DiagonalizationResidual out;
  out.identity_defect = (a * bigm - bigm * d_plus_r).max_abs();

  // g = h'/(2 h^2) is the scalar coefficient of N^(1); its derivative feeds
  // D_t N^(1) = -i g' J.
  const double g = h1 / (2.0 * m.v);
  const double gp = h2 / (2.0 * m.v) - h1 * h1 / (m.v * h);
  const Mat2c n1{cplx{1.0}, cplx{g}, cplx{-g}, cplx{1.0}};  // I + g J
  const cplx det = n1.det();
  if (std::abs(det) < 1e-12)
    throw std::runtime_error("diagonalization_residual: I + N^(1) is singular");
  const Mat2c n1_inv{n1.a22 / det, -n1.a12 / det, -n1.a21 / det, n1.a11 / det};

  const cplx dtg = -i * gp;
  const Mat2c dt_n1{cplx{0.0}, dtg, -dtg, cplx{0.0}};
  const Mat2c rr{r, -r, -r, r};
  const Mat2c n1_off{cplx{0.0}, cplx{g}, cplx{-g}, cplx{0.0}};
  const Mat2c r_n1 = rr * n1_off;
  const Mat2c f0{r, cplx{0.0}, cplx{0.0}, r};
  const Mat2c n1_f0 = n1_off * f0;
  const Mat2c inner{dt_n1.a11 - r_n1.a11 + n1_f0.a11,
                    dt_n1.a12 - r_n1.a12 + n1_f0.a12,
                    dt_n1.a21 - r_n1.a21 + n1_f0.a21,
                    dt_n1.a22 - r_n1.a22 + n1_f0.a22};
  const Mat2c r1 = n1_inv * inner;
  out.r1_norm = r1.max_abs();
  return out;
}

}  // namespace overdamp
