#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "overdamp/green.hpp"
#include "overdamp/quadrature.hpp"

using namespace overdamp;

namespace {
double profile_norm(const RadialProfile& p, int alpha = 0) {
  // Independent adaptive-quadrature evaluation of the data norm.
  const double cn = 2.0 * std::pow(M_PI, 0.5 * p.n) / std::tgamma(0.5 * p.n) /
                    std::pow(2.0 * M_PI, p.n);
  auto q = integrate_adaptive(
      [&](double lr) {
        const double r = std::exp(lr);
        return std::pow(r, 2.0 * alpha + p.n - 1) * p(r) * p(r) * r;
      },
      std::log(1e-6), std::log(1e2), 1e-12);
  return std::sqrt(cn * q.value);
}
}  // namespace

TEST_CASE("identity at t = s returns the data norm") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile prof;
  prof.kind = RadialProfile::Kind::gaussian;
  prof.scale = 1.0;
  prof.n = 3;
  const double measured =
      radial_l2_norm(GreenEntry::G11, 0, prof, spec, 2.0, 2.0);
  CHECK(measured == Catch::Approx(profile_norm(prof)).epsilon(1e-6));
}

TEST_CASE("narrow ring reduces to a single-mode evaluation") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile ring;
  ring.kind = RadialProfile::Kind::ring;
  ring.scale = 0.5;
  ring.n = 2;
  const double t = 10.0;
  // The 5%-wide ring needs a dense node set to resolve.
  const double norm =
      radial_l2_norm(GreenEntry::G22, 0, ring, spec, 0.0, t, 8192);
  const double times[1] = {t};
  auto prop = propagate_mode(ModeSystem::coupled, spec, ring.scale, 0.0, times);
  const double expected = std::abs(prop.at_times[0].a22) * profile_norm(ring);
  CHECK(norm == Catch::Approx(expected).epsilon(2e-2));
}

TEST_CASE("node doubling self-convergence on the gaussian profile") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile prof;
  prof.n = 2;
  const double a = radial_l2_norm(GreenEntry::G11, 0, prof, spec, 0.0, 100.0, 512);
  const double b = radial_l2_norm(GreenEntry::G11, 0, prof, spec, 0.0, 100.0, 1024);
  CHECK(std::abs(a - b) / b < 1e-4);
}

TEST_CASE("grid size precondition") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile prof;
  CHECK_THROWS(radial_l2_norm(GreenEntry::G11, 0, prof, spec, 0.0, 1.0, 32));
}

TEST_CASE("predicted envelopes match their closed forms") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  const int n = 2;
  auto g11 = DecayPrediction::for_entry(GreenEntry::G11, spec, n, 0);
  CHECK(predicted_envelope(g11, spec, 0.0, 3.0) ==
        Catch::Approx(std::pow(gamma_of(spec, 0.0, 3.0), 1.0)));
  CHECK(g11.fit_exponent(spec) == Catch::Approx(-0.25));

  auto g22opt = DecayPrediction::for_entry(GreenEntry::G22opt, spec, n, 1);
  CHECK(g22opt.gamma_power == Catch::Approx(n / 2.0 + 1 + 2));
  CHECK(g22opt.t_prefactor == Catch::Approx(-0.5));
  CHECK(g22opt.s_prefactor == Catch::Approx(-0.5));

  const auto crit = DampingSpec::checked(1.0, -1.0);
  auto g22c = DecayPrediction::for_entry(GreenEntry::G22, crit, 4, 0);
  const double t = 20.0, s = 2.0;
  const double expect = ((1.0 + s) / (1.0 + t)) *
                        std::pow(1.0 + std::log((1.0 + t) / (1.0 + s)), -1.0);
  CHECK(predicted_envelope(g22c, crit, s, t) == Catch::Approx(expect));
  // Branch mismatch rejected.
  CHECK_THROWS(predicted_envelope(g22c, spec, s, t));
}

TEST_CASE("G11 decay verification on a short grid", "[green]") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile prof;
  prof.n = 2;
  auto grid = log_time_grid(10.0, 1e5, 13);
  RadialQuadOptions opt;
  opt.grid_size = 256;
  opt.r_max = 20.0;  // gaussian tail is zero far earlier
  auto rep = verify_green_decay(GreenEntry::G11, 0, prof, spec, 0.0, grid, opt,
                                /*check_lower=*/true);
  CHECK(rep.fit.exponent == Catch::Approx(-0.25).margin(0.05));
  CHECK(rep.bounded_above);
  CHECK(rep.bounded_below);
  CHECK(rep.series.converged);
  CHECK(rep.series.det_defect_entry < 1e-6);
}

TEST_CASE("wave_u envelope carries the extra ratio factor", "[green]") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  RadialProfile prof;
  prof.n = 2;
  auto grid = log_time_grid(10.0, 1e4, 9);
  RadialQuadOptions opt;
  opt.grid_size = 192;
  opt.r_max = 20.0;
  auto rv = verify_green_decay(GreenEntry::wave_v, 0, prof, spec, 0.0, grid, opt);
  auto ru = verify_green_decay(GreenEntry::wave_u, 0, prof, spec, 0.0, grid, opt);
  CHECK(rv.bounded_above);
  CHECK(ru.bounded_above);
  // u decays faster by about (1+t)^lambda at s = 0.
  CHECK(ru.fit.exponent - rv.fit.exponent ==
        Catch::Approx(spec.lambda).margin(0.1));
}
