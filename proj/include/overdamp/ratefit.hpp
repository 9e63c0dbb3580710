#pragma once

// Least-squares rate fitting for decay series: algebraic exponents against
// ln(1+t), logarithmic exponents against ln ln(e+t), and the joint
// (power, log) two-regressor fit used when a series carries both factors.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace overdamp {

struct TimeSample {
  double t = 0.0;
  double y = 0.0;
};

using TimeSeries = std::vector<TimeSample>;

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct RateFit {
  double exponent = 0.0;      // slope vs ln(1+t)
  double log_exponent = 0.0;  // slope vs ln ln(e+t)
  double r_squared = 0.0;
  FitWindow window;
  double residual_max = 0.0;
  int samples = 0;
};

namespace detail {

inline std::vector<TimeSample> window_select(const TimeSeries& series,
                                             const FitWindow& w) {
  // Small relative slack so grid endpoints generated by exp(log(.)) land
  // inside their own window.
  const double lo = w.t_lo * (1.0 - 1e-9);
  const double hi = w.t_hi * (1.0 + 1e-9);
  std::vector<TimeSample> out;
  for (const auto& p : series)
    if (p.t >= lo && p.t <= hi) out.push_back(p);
  return out;
}

// Ordinary least squares of z on one regressor x (with intercept).
struct Ols1 {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, res_max = 0.0;
};

inline Ols1 ols1(const std::vector<double>& x, const std::vector<double>& z) {
  const std::size_t n = x.size();
  double sx = 0, sz = 0, sxx = 0, sxz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sz += z[i];
    sxx += x[i] * x[i];
    sxz += x[i] * z[i];
  }
  const double den = n * sxx - sx * sx;
  Ols1 f;
  f.slope = (n * sxz - sx * sz) / den;
  f.intercept = (sz - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double zbar = sz / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = z[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
    ss_tot += (z[i] - zbar) * (z[i] - zbar);
    f.res_max = std::max(f.res_max, std::abs(r));
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Least squares of z on two regressors (with intercept), via the 3x3 normal
// equations.  Adequate here: the series are noiseless and short.
struct Ols2 {
  double b1 = 0.0, b2 = 0.0, intercept = 0.0, r2 = 0.0, res_max = 0.0;
};

inline Ols2 ols2(const std::vector<double>& x1, const std::vector<double>& x2,
                 const std::vector<double>& z) {
  const std::size_t n = x1.size();
  double m[3][3] = {{(double)n, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    m[0][1] += x1[i];
    m[0][2] += x2[i];
    m[1][1] += x1[i] * x1[i];
    m[1][2] += x1[i] * x2[i];
    m[2][2] += x2[i] * x2[i];
    rhs[0] += z[i];
    rhs[1] += x1[i] * z[i];
    rhs[2] += x2[i] * z[i];
  }
  m[1][0] = m[0][1];
  m[2][0] = m[0][2];
  m[2][1] = m[1][2];
  // Gaussian elimination with partial pivoting.
  int piv[3] = {0, 1, 2};
  for (int c = 0; c < 3; ++c) {
    int best = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[piv[r]][c]) > std::abs(m[piv[best]][c])) best = r;
    std::swap(piv[c], piv[best]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = m[piv[r]][c] / m[piv[c]][c];
      for (int k = c; k < 3; ++k) m[piv[r]][k] -= f * m[piv[c]][k];
      rhs[piv[r]] -= f * rhs[piv[c]];
    }
  }
  double sol[3];
  for (int c = 2; c >= 0; --c) {
    double v = rhs[piv[c]];
    for (int k = c + 1; k < 3; ++k) v -= m[piv[c]][k] * sol[k];
    sol[c] = v / m[piv[c]][c];
  }
  Ols2 f;
  f.intercept = sol[0];
  f.b1 = sol[1];
  f.b2 = sol[2];
  double ss_res = 0, ss_tot = 0, zbar = rhs[0];
  zbar = 0;
  for (std::size_t i = 0; i < n; ++i) zbar += z[i];
  zbar /= n;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = z[i] - (f.intercept + f.b1 * x1[i] + f.b2 * x2[i]);
    ss_res += r * r;
    ss_tot += (z[i] - zbar) * (z[i] - zbar);
    f.res_max = std::max(f.res_max, std::abs(r));
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace detail

// Slope of ln y vs ln(1+t) over the window.  With log_correction the fit adds
// ln ln(e+t) as a second regressor, so series of the form
// (1+t)^p * ln(e+t)^q are resolved into (exponent, log_exponent) = (p, q).
inline RateFit fit_power_exponent(const TimeSeries& series, FitWindow window,
                                  bool log_correction = false) {
  auto pts = detail::window_select(series, window);
  if (pts.size() < 5)
    throw std::invalid_argument("fit_power_exponent: need >= 5 samples in window");
  std::vector<double> x1, x2, z;
  for (const auto& p : pts) {
    if (!(p.y > 0.0))
      throw std::invalid_argument("fit_power_exponent: y must be positive");
    x1.push_back(std::log1p(p.t));
    x2.push_back(std::log(std::log(M_E + p.t)));
    z.push_back(std::log(p.y));
  }
  RateFit fit;
  fit.window = window;
  fit.samples = static_cast<int>(pts.size());
  if (log_correction) {
    auto f = detail::ols2(x1, x2, z);
    fit.exponent = f.b1;
    fit.log_exponent = f.b2;
    fit.r_squared = f.r2;
    fit.residual_max = f.res_max;
  } else {
    auto f = detail::ols1(x1, z);
    fit.exponent = f.slope;
    fit.r_squared = f.r2;
    fit.residual_max = f.res_max;
  }
  return fit;
}

// Slope of ln y vs ln ln(e+t), after dividing out a declared (1+t)^p
// prefactor.  The window must span at least min_lnln_span in ln ln(e+t); the
// default 1.0 keeps fits meaningful (one e-fold of the log scale).
inline RateFit fit_log_exponent(const TimeSeries& series, FitWindow window,
                                double declared_power = 0.0,
                                double min_lnln_span = 1.0) {
  auto pts = detail::window_select(series, window);
  if (pts.size() < 5)
    throw std::invalid_argument("fit_log_exponent: need >= 5 samples in window");
  double lo = 1e300, hi = -1e300;
  std::vector<double> x, z;
  for (const auto& p : pts) {
    if (!(p.y > 0.0))
      throw std::invalid_argument("fit_log_exponent: y must be positive");
    const double xx = std::log(std::log(M_E + p.t));
    lo = std::min(lo, xx);
    hi = std::max(hi, xx);
    x.push_back(xx);
    z.push_back(std::log(p.y) - declared_power * std::log1p(p.t));
  }
  if (hi - lo < min_lnln_span)
    throw std::invalid_argument(
        "fit_log_exponent: window too narrow in ln ln(e+t)");
  auto f = detail::ols1(x, z);
  RateFit fit;
  fit.window = window;
  fit.samples = static_cast<int>(pts.size());
  fit.log_exponent = f.slope;
  fit.exponent = declared_power;
  fit.r_squared = f.r2;
  fit.residual_max = f.res_max;
  return fit;
}

// Log-spaced time grid, endpoints included.
inline std::vector<double> log_time_grid(double t_lo, double t_hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : double(i) / (points - 1);
    g[i] = std::exp(std::log(t_lo) + f * (std::log(t_hi) - std::log(t_lo)));
  }
  return g;
}

}  // namespace overdamp
