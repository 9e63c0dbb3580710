#pragma once

// Small self-contained quadrature kit: adaptive Gauss-Kronrod (G7/K15) on an
// interval, and Gauss-Legendre node generation for fixed-order rules.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace overdamp {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool converged = true;
  int intervals = 0;
};

namespace detail {

// Nodes/weights of the 15-point Kronrod extension of Gauss-7 on [-1, 1]
// (positive half; the rule is symmetric).
inline constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double* value, double* err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(mid - half * kK15Nodes[i]);
    fv[14 - i] = f(mid + half * kK15Nodes[i]);
  }
  fv[7] = f(mid);
  double kron = 0.0;
  for (int i = 0; i < 7; ++i) kron += kK15Weights[i] * (fv[i] + fv[14 - i]);
  kron += kK15Weights[7] * fv[7];
  // Gauss-7 uses the odd Kronrod nodes.
  double gauss = kG7Weights[3] * fv[7];
  for (int i = 0; i < 3; ++i)
    gauss += kG7Weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  *value = kron * half;
  *err = std::abs((kron - gauss) * half);
}

}  // namespace detail

// Adaptive bisection on top of G7/K15.  Splits the worst interval until the
// summed error estimate meets abs_tol + rel_tol*|integral|.
template <typename F>
inline QuadResult integrate_adaptive(const F& f, double a, double b,
                                     double rel_tol = 1e-10,
                                     double abs_tol = 0.0,
                                     int max_intervals = 2000) {
  struct Seg {
    double a, b, value, error;
  };
  std::vector<Seg> segs;
  double v, e;
  detail::gk15(f, a, b, &v, &e);
  segs.push_back({a, b, v, e});
  QuadResult out;
  for (int iter = 0; iter < max_intervals; ++iter) {
    double total = 0.0, total_err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      total_err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    out.value = total;
    out.error = total_err;
    out.intervals = static_cast<int>(segs.size());
    if (total_err <= abs_tol + rel_tol * std::abs(total)) return out;
    Seg s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    Seg left{s.a, mid, 0, 0}, right{mid, s.b, 0, 0};
    detail::gk15(f, left.a, left.b, &left.value, &left.error);
    detail::gk15(f, right.a, right.b, &right.value, &right.error);
    segs[worst] = left;
    segs.push_back(right);
  }
  out.converged = false;
  return out;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Chebyshev initial guess.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

}  // namespace overdamp
