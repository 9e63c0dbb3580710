#pragma once

// Numerical checker for the relaxed Gronwall inequality: integrate the
// equality version of
//   F' + eta F <= omega(t) H^theta(t) + g(t),   c1 H - g <= F <= c2 H + g,
// with the adversarial sandwich member H = max(0, F + g)/c1, then assert the
// lemma's conclusions against a constant calibrated once on a seed scenario.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace overdamp {

struct GronwallScenario {
  double eta = 1.0;     // > 0
  double theta = 0.5;   // in (0,1)
  double c1 = 1.0;      // 0 < c1 <= c2
  double c2 = 1.0;
  std::function<double(double)> omega_fn;  // nonnegative
  std::function<double(double)> g_fn;      // nonnegative
  bool monotone = true;  // omega, g declared monotone decreasing
  double f0 = 1.0;
  double horizon = 50.0;

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("GronwallScenario: eta > 0");
    if (!(theta > 0.0 && theta < 1.0))
      throw std::invalid_argument("GronwallScenario: theta in (0,1)");
    if (!(c1 > 0.0 && c1 <= c2))
      throw std::invalid_argument("GronwallScenario: need 0 < c1 <= c2");
    if (!omega_fn || !g_fn)
      throw std::invalid_argument("GronwallScenario: omega, g required");
  }
};

struct GronwallReport {
  // Largest ratios of the measured quantity to the corresponding bound.
  double sup_ratio = 0.0;        // F(t) vs the sup bound (valid for any omega, g)
  double decay_ratio = 0.0;      // H(t) vs the four-term decay bound (monotone case)
  double f_end = 0.0;
  double h_end = 0.0;
  bool decay_checked = false;
  std::vector<double> times;
  std::vector<double> f_values;
  std::vector<double> h_values;
};

namespace detail {

// Dormand-Prince-style embedded step is overkill here; RK4 with step doubling
// is plenty for these smooth scalar right-hand sides.
template <typename Rhs>
inline double rk4_step(const Rhs& f, double t, double y, double h) {
  const double k1 = f(t, y);
  const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = f(t + h, y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Rhs>
inline void integrate_scalar(const Rhs& f, double t0, double t1, double y0,
                             double rtol,
                             const std::function<void(double, double)>& on_sample) {
  double t = t0, y = y0, h = std::min(1e-2, (t1 - t0) / 10.0);
  on_sample(t, y);
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    const double y_full = rk4_step(f, t, y, h);
    const double y_mid = rk4_step(f, t, y, 0.5 * h);
    const double y_two = rk4_step(f, t + 0.5 * h, y_mid, 0.5 * h);
    const double err = std::abs(y_full - y_two);
    const double scale = 1e-14 + rtol * std::abs(y_two);
    if (err <= scale) {
      t += h;
      y = y_two;
      on_sample(t, y);
      if (err > 0.0)
        h *= std::min(3.0, std::max(0.3, 0.9 * std::pow(scale / err, 0.2)));
      else
        h *= 3.0;
    } else {
      h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.2));
      if (h < 1e-12)
        throw std::runtime_error("gronwall_check: step underflow");
    }
  }
}

}  // namespace detail

// Integrates F' = -eta F + omega(t) H^theta + g(t) with H = max(0, F+g)/c1
// and reports the worst bound ratios:
//   sup bound:   F(t) <= K max{F(0), sup_{s<t}((omega/eta)^{1/(1-theta)}
//                                   + g (1 + 1/eta))}
//   decay bound: H(t) <= K [ F(0) e^{-eta t/2}
//                  + (eta^{-1/(1-theta)} omega(0)^{1/(1-theta)}
//                     + (1+1/eta) g(0)) e^{-eta t/8}
//                  + eta^{-1/(1-theta)} omega(t/2)^{1/(1-theta)}
//                  + (1+1/eta) g(t/2) ]        (monotone omega, g only).
inline GronwallReport gronwall_check(const GronwallScenario& sc,
                                     bool check_decay_bound = true,
                                     double rtol = 1e-9) {
  sc.validate();
  if (check_decay_bound && !sc.monotone)
    throw std::invalid_argument(
        "gronwall_check: decay bound requires monotone omega, g");
  auto h_of = [&](double t, double f) {
    return std::max(0.0, f + sc.g_fn(t)) / sc.c1;
  };
  auto rhs = [&](double t, double f) {
    return -sc.eta * f + sc.omega_fn(t) * std::pow(h_of(t, f), sc.theta) +
           sc.g_fn(t);
  };

  GronwallReport rep;
  const double pw = 1.0 / (1.0 - sc.theta);
  double running_sup = 0.0;
  auto on_sample = [&](double t, double f) {
    running_sup = std::max(running_sup, std::pow(sc.omega_fn(t) / sc.eta, pw) +
                                            sc.g_fn(t) * (1.0 + 1.0 / sc.eta));
    const double sup_bound = std::max(sc.f0, running_sup);
    if (sup_bound > 0.0)
      rep.sup_ratio = std::max(rep.sup_ratio, f / sup_bound);
    const double h = h_of(t, f);
    if (check_decay_bound) {
      const double decay_bound =
          sc.f0 * std::exp(-0.5 * sc.eta * t) +
          (std::pow(sc.omega_fn(0.0), pw) / std::pow(sc.eta, pw) +
           (1.0 + 1.0 / sc.eta) * sc.g_fn(0.0)) *
              std::exp(-sc.eta * t / 8.0) +
          std::pow(sc.omega_fn(0.5 * t), pw) / std::pow(sc.eta, pw) +
          (1.0 + 1.0 / sc.eta) * sc.g_fn(0.5 * t);
      if (decay_bound > 0.0)
        rep.decay_ratio = std::max(rep.decay_ratio, h / decay_bound);
    }
    rep.times.push_back(t);
    rep.f_values.push_back(f);
    rep.h_values.push_back(h);
  };
  detail::integrate_scalar(rhs, 0.0, sc.horizon, sc.f0, rtol, on_sample);
  rep.f_end = rep.f_values.back();
  rep.h_end = rep.h_values.back();
  rep.decay_checked = check_decay_bound;
  return rep;
}

}  // namespace overdamp
