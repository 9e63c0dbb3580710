#pragma once

// Truncated Peano-Baker series for the per-mode Green matrix,
//   G(t,s) = I + sum_k int_s^t A(t1) int_s^{t1} A(t2) ... int_s^{t_{k-1}} A(t_k),
// with the generator of the Fourier-transformed system
//   A(t,xi) = [[0, -i xi], [-i xi, -b(t)]].
// Each iterated integral is built by Gauss-Legendre quadrature with the inner
// integrand interpolated from Chebyshev-Lobatto samples of the previous term.
// This is the short-interval oracle against which the production integrator
// is checked.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "overdamp/damping.hpp"
#include "overdamp/mode.hpp"
#include "overdamp/quadrature.hpp"

namespace overdamp {

struct PeanoBakerResult {
  Mat2c g;
  double last_term = 0.0;  // max-norm of the last included series term
  int terms = 0;
  bool converged = true;  // last term <= 1e-12
};

namespace detail {

constexpr int kPbChebPoints = 32;  // Lobatto samples per term
constexpr int kPbGaussOrder = 16;

struct ChebGrid {
  std::vector<double> x;  // Chebyshev-Lobatto nodes on [s,t], x[0] = t, x[M] = s
  std::vector<double> w;  // barycentric weights
};

inline ChebGrid cheb_grid(double s, double t, int m) {
  ChebGrid g;
  g.x.resize(m + 1);
  g.w.resize(m + 1);
  const double mid = 0.5 * (s + t), half = 0.5 * (t - s);
  for (int j = 0; j <= m; ++j) {
    g.x[j] = mid + half * std::cos(M_PI * j / m);
    g.w[j] = (j % 2 == 0 ? 1.0 : -1.0);
  }
  g.w[0] *= 0.5;
  g.w[m] *= 0.5;
  return g;
}

inline Mat2c interp(const ChebGrid& grid, const std::vector<Mat2c>& f,
                    double x) {
  double denom = 0.0;
  cplx n11 = 0, n12 = 0, n21 = 0, n22 = 0;
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    const double dx = x - grid.x[j];
    if (std::abs(dx) < 1e-300) return f[j];
    const double c = grid.w[j] / dx;
    denom += c;
    n11 += c * f[j].a11;
    n12 += c * f[j].a12;
    n21 += c * f[j].a21;
    n22 += c * f[j].a22;
  }
  return {n11 / denom, n12 / denom, n21 / denom, n22 / denom};
}

}  // namespace detail

inline PeanoBakerResult peano_baker_green(const DampingSpec& spec,
                                          double xi_mag, double s, double t,
                                          int terms) {
  if (terms < 1) throw std::invalid_argument("peano_baker_green: terms >= 1");
  if (t < s) throw std::invalid_argument("peano_baker_green: t >= s required");
  PeanoBakerResult out;
  out.terms = terms;
  if (t == s) return out;  // identity, empty integrals

  auto gen = [&](double tau) -> Mat2c {
    const cplx mixi{0.0, -xi_mag};
    return {cplx{0.0}, mixi, mixi, cplx{-b_of_t(spec, tau), 0.0}};
  };

  const int m = detail::kPbChebPoints;
  const auto grid = detail::cheb_grid(s, t, m);
  static const GaussRule rule = gauss_legendre(detail::kPbGaussOrder);

  // prev[j] = P_{k-1}(x_j); start with P_0 = I.
  std::vector<Mat2c> prev(m + 1, Mat2c::identity());
  Mat2c total = Mat2c::identity();
  for (int k = 1; k <= terms; ++k) {
    std::vector<Mat2c> next(m + 1);
    for (int j = 0; j <= m; ++j) {
      const double upper = grid.x[j];
      Mat2c acc{cplx{0.0}, cplx{0.0}, cplx{0.0}, cplx{0.0}};
      if (upper > s) {
        const double midq = 0.5 * (s + upper), halfq = 0.5 * (upper - s);
        for (int q = 0; q < detail::kPbGaussOrder; ++q) {
          const double tau = midq + halfq * rule.nodes[q];
          const Mat2c a = gen(tau);
          const Mat2c p = detail::interp(grid, prev, tau);
          const double w = rule.weights[q] * halfq;
          acc.a11 += w * (a.a11 * p.a11 + a.a12 * p.a21);
          acc.a12 += w * (a.a11 * p.a12 + a.a12 * p.a22);
          acc.a21 += w * (a.a21 * p.a11 + a.a22 * p.a21);
          acc.a22 += w * (a.a21 * p.a12 + a.a22 * p.a22);
        }
      }
      next[j] = acc;
    }
    total.a11 += next[0].a11;  // x[0] = t
    total.a12 += next[0].a12;
    total.a21 += next[0].a21;
    total.a22 += next[0].a22;
    out.last_term = next[0].max_abs();
    prev = std::move(next);
  }
  out.g = total;
  out.converged = out.last_term <= 1e-12;
  return out;
}

// The coupled system integrated by propagate_mode uses the real form
//   a' = -xi b,  b' = xi a - b(t) b,
// which is diag(1,-i)-similar to the Fourier generator above.  This helper
// transports the Peano-Baker result into that real frame for cross-checks.
struct PeanoBakerReal {
  Mat2 m;
  double imag_leak = 0.0;  // largest imaginary residue after the transform
  double last_term = 0.0;
  bool converged = true;
};

inline PeanoBakerReal peano_baker_coupled_real(const DampingSpec& spec,
                                               double xi_mag, double s,
                                               double t, int terms) {
  const auto pb = peano_baker_green(spec, xi_mag, s, t, terms);
  const cplx i{0.0, 1.0};
  const cplx r11 = pb.g.a11, r12 = -i * pb.g.a12, r21 = i * pb.g.a21,
             r22 = pb.g.a22;
  PeanoBakerReal out;
  out.m = {r11.real(), r12.real(), r21.real(), r22.real()};
  out.imag_leak = std::max(std::max(std::abs(r11.imag()), std::abs(r12.imag())),
                           std::max(std::abs(r21.imag()), std::abs(r22.imag())));
  out.last_term = pb.last_term;
  out.converged = pb.converged;
  return out;
}

}  // namespace overdamp
