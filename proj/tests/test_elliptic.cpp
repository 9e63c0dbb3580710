#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "overdamp/elliptic.hpp"
#include "overdamp/ratefit.hpp"

using namespace overdamp;

TEST_CASE("sqrt|m| derivative matches centered finite differences") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  for (double t : {5.0, 50.0, 500.0}) {
    for (double xi : {0.0, 1e-3, 0.05}) {
      const double h = 1e-5 * (1.0 + t);
      auto sq = [&](double tt) {
        return std::sqrt(std::abs(m_symbol(WaveKind::v, spec, tt, xi)));
      };
      const double fd = (sq(t + h) - sq(t - h)) / (2.0 * h);
      const double an = sqrt_abs_m_deriv(WaveKind::v, spec, t, xi);
      CHECK(an == Catch::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("elliptic residual basics") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  // Zero frequency, u system: pure b-terms, finite.
  const double r0 = elliptic_residual(WaveKind::u, spec, 10.0, 0.0);
  CHECK(std::isfinite(r0));
  // Outside the elliptic zone (m >= 0) rejected.
  CHECK_THROWS(elliptic_residual(WaveKind::v, spec, 0.0, 10.0));
}

TEST_CASE("elliptic residual decays like (1+t)^(lambda-2)") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  const double xi = 1e-4;
  TimeSeries rv, ru;
  for (double t : log_time_grid(1e2, 1e6, 17)) {
    rv.push_back({t, elliptic_residual(WaveKind::v, spec, t, xi)});
    ru.push_back({t, elliptic_residual(WaveKind::u, spec, t, xi)});
  }
  CHECK(fit_power_exponent(rv, {1e2, 1e6}).exponent ==
        Catch::Approx(-2.5).margin(0.1));
  CHECK(fit_power_exponent(ru, {1e2, 1e6}).exponent ==
        Catch::Approx(-2.5).margin(0.1));
}

TEST_CASE("diagonalization identity defect is machine zero") {
  const auto spec = DampingSpec::checked(1.3, -0.7);
  for (double t : {5.0, 100.0, 1e4})
    for (double xi : {0.0, 1e-3, 0.1}) {
      const auto d = diagonalization_residual(spec, t, xi);
      CHECK(d.identity_defect <= 1e-10);
      CHECK(std::isfinite(d.r1_norm));
    }
}

TEST_CASE("remainder matrix norm decays like (1+t)^(lambda-2)") {
  for (double lambda : {-0.25, -0.5, -0.75}) {
    const auto spec = DampingSpec::checked(1.0, lambda);
    TimeSeries r1;
    for (double t : log_time_grid(1e2, 1e6, 17))
      r1.push_back({t, diagonalization_residual(spec, t, 1e-4).r1_norm});
    CHECK(fit_power_exponent(r1, {1e2, 1e6}).exponent ==
          Catch::Approx(lambda - 2.0).margin(0.1));
  }
}

TEST_CASE("diagonalization rejects non-elliptic points") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  CHECK_THROWS(diagonalization_residual(spec, 0.0, 10.0));
}
