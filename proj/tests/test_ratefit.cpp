#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "overdamp/ratefit.hpp"

using namespace overdamp;

TEST_CASE("exact power law recovered") {
  TimeSeries s;
  for (double t : log_time_grid(1.0, 1e5, 31))
    s.push_back({t, std::pow(1.0 + t, -1.5)});
  auto fit = fit_power_exponent(s, {1.0, 1e5});
  CHECK(fit.exponent == Catch::Approx(-1.5).margin(1e-10));
  CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("constant series fits zero exponent") {
  TimeSeries s;
  for (double t : log_time_grid(1.0, 1e4, 21)) s.push_back({t, 3.7});
  CHECK(fit_power_exponent(s, {1.0, 1e4}).exponent ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(fit_log_exponent(s, {1.0, 1e4}).log_exponent ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("log factor drifts the plain fit; log correction recovers it") {
  TimeSeries s;
  for (double t : log_time_grid(1e2, 1e6, 25))
    s.push_back({t, std::log(M_E + t) / (1.0 + t)});
  const auto plain = fit_power_exponent(s, {1e2, 1e6});
  CHECK(std::abs(plain.exponent + 1.0) > 0.05);  // drift visible
  const auto corrected = fit_power_exponent(s, {1e2, 1e6}, true);
  CHECK(corrected.exponent == Catch::Approx(-1.0).margin(0.02));
  CHECK(corrected.log_exponent == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("log exponent fits") {
  TimeSeries s;
  for (double t : log_time_grid(1e2, 1e10, 33))
    s.push_back({t, std::pow(std::log(M_E + t), -1.75)});
  auto fit = fit_log_exponent(s, {1e2, 1e10});
  CHECK(fit.log_exponent == Catch::Approx(-1.75).margin(1e-10));

  // Declared algebraic prefactor divided out first.
  TimeSeries s2;
  for (double t : log_time_grid(1e2, 1e10, 33))
    s2.push_back({t, std::pow(1.0 + t, -1.0) *
                         std::pow(std::log(M_E + t), -2.25)});
  fit = fit_log_exponent(s2, {1e2, 1e10}, -1.0);
  CHECK(fit.log_exponent == Catch::Approx(-2.25).margin(0.05));
}

TEST_CASE("fit preconditions") {
  TimeSeries tiny;
  for (double t : {1.0, 2.0, 3.0}) tiny.push_back({t, 1.0});
  CHECK_THROWS(fit_power_exponent(tiny, {0.5, 4.0}));
  TimeSeries narrow;
  for (double t : log_time_grid(10.0, 20.0, 9)) narrow.push_back({t, 1.0});
  CHECK_THROWS(fit_log_exponent(narrow, {10.0, 20.0}));  // lnln span < 1
}

TEST_CASE("fit stability under sample-density doubling") {
  auto make = [&](int pts) {
    TimeSeries s;
    for (double t : log_time_grid(10.0, 1e6, pts))
      s.push_back({t, 2.0 * std::pow(1.0 + t, -0.8)});
    return fit_power_exponent(s, {10.0, 1e6}).exponent;
  };
  CHECK(std::abs(make(20) - make(40)) < 1e-3);
}
