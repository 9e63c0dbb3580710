#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "overdamp/damping.hpp"
#include "overdamp/mode.hpp"
#include "overdamp/peano_baker.hpp"

using namespace overdamp;

TEST_CASE("expm2 closed form against known exponentials") {
  // Rotation block.
  const double th = 0.7;
  auto r = detail::expm2(Mat2{0.0, th, -th, 0.0});
  CHECK(r.e.a11 == Catch::Approx(std::cos(th)).margin(1e-14));
  CHECK(r.e.a12 == Catch::Approx(std::sin(th)).margin(1e-14));
  // Stiff diagonal.
  auto d = detail::expm2(Mat2{0.0, 0.0, 0.0, -50.0});
  CHECK(d.e.a11 == Catch::Approx(1.0));
  CHECK(d.e.a22 == Catch::Approx(std::exp(-50.0)).epsilon(1e-12));
  // Random small matrices against the Taylor series.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 50; ++i) {
    Mat2 m{u(rng), u(rng), u(rng), u(rng) - 1.0};
    Mat2 series = Mat2::identity();
    Mat2 term = Mat2::identity();
    for (int k = 1; k <= 30; ++k) {
      term = term * m;
      const double c = 1.0 / std::tgamma(k + 1.0);
      series.a11 += c * term.a11;
      series.a12 += c * term.a12;
      series.a21 += c * term.a21;
      series.a22 += c * term.a22;
    }
    auto e = detail::expm2(m);
    CHECK(e.e.a11 == Catch::Approx(series.a11).margin(1e-13));
    CHECK(e.e.a12 == Catch::Approx(series.a12).margin(1e-13));
    CHECK(e.e.a21 == Catch::Approx(series.a21).margin(1e-13));
    CHECK(e.e.a22 == Catch::Approx(series.a22).margin(1e-13));
  }
}

TEST_CASE("m_symbol closed forms") {
  const auto spec = DampingSpec::checked(2.0, -0.5);
  CHECK(m_symbol(WaveKind::v, spec, 0.0, 2.0) == Catch::Approx(2.5));
  // m_u - m_v = b'.
  for (double t : {0.0, 1.0, 7.0})
    for (double xi : {0.0, 0.5, 3.0})
      CHECK(m_symbol(WaveKind::u, spec, t, xi) -
                m_symbol(WaveKind::v, spec, t, xi) ==
            Catch::Approx(b_deriv(spec, t, 1)).epsilon(1e-12));
  // m_v -> -inf as t -> inf for fixed xi.
  CHECK(m_symbol(WaveKind::v, spec, 1e8, 3.0) < -1e3);
}

TEST_CASE("zone classification") {
  const auto spec = DampingSpec::checked(2.0, -0.5);
  ZonePartition part;
  part.eps = 0.125;
  part.big_n = 2.0;
  part.t_ell = 1.0;
  part.c0 = 0.5;
  // sqrt(2.5) ~ 1.58 in [eps*b, N*b] = [0.25, 4] with m > 0 -> Pd.
  CHECK(classify_zone(WaveKind::v, spec, part, 0.0, 2.0) == ZoneLabel::Pd);
  // Zero frequency, late time: elliptic.
  CHECK(classify_zone(WaveKind::v, spec, part, 10.0, 0.0) == ZoneLabel::Ell);
  // Same point before t_ell: the bounded remainder.
  CHECK(classify_zone(WaveKind::v, spec, part, 0.5, 0.0) ==
        ZoneLabel::BoundedRemainder);
  // Dominant |xi|^2: hyperbolic.
  CHECK(classify_zone(WaveKind::v, spec, part, 0.0, 50.0) == ZoneLabel::Hyp);
  // Exactly one label over a sweep.
  for (double t : {0.0, 0.5, 2.0, 40.0, 1e4})
    for (double xi : {0.0, 0.05, 0.3, 1.0, 4.0, 60.0}) {
      int hits = 0;
      const auto z = classify_zone(WaveKind::v, spec, part, t, xi);
      for (auto cand : {ZoneLabel::Hyp, ZoneLabel::Pd, ZoneLabel::Red,
                        ZoneLabel::Ell, ZoneLabel::BoundedRemainder})
        if (z == cand) ++hits;
      CHECK(hits == 1);
    }
}

TEST_CASE("expanding elliptic zone traps low frequencies") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  auto part = ZonePartition::defaults(spec);
  const double xi = 0.2;  // <= c0 = 0.25
  bool reached = false;
  for (double t = part.t_ell; t < 1e6; t *= 2.0 + 1.0) {
    const auto z = classify_zone(WaveKind::v, spec, part, t, xi);
    if (reached) CHECK(z == ZoneLabel::Ell);
    if (z == ZoneLabel::Ell) reached = true;
  }
  CHECK(reached);
}

TEST_CASE("hyperbolic exit time") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  auto part = ZonePartition::defaults(spec);
  // Small xi with m(0) < 0 never enters the hyperbolic zone.
  CHECK(!hyperbolic_exit_time(WaveKind::v, spec, part, 0.05).has_value());
  // Root condition at the returned time.
  const double xi = 30.0;
  const auto t_exit = hyperbolic_exit_time(WaveKind::v, spec, part, xi);
  REQUIRE(t_exit.has_value());
  const double m = m_symbol(WaveKind::v, spec, *t_exit, xi);
  const double b = b_of_t(spec, *t_exit);
  CHECK(std::abs(std::sqrt(std::abs(m)) - part.big_n * b) / b < 1e-7);
  // Monotone in |xi|.
  double prev = 0.0;
  for (double x : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    const auto te = hyperbolic_exit_time(WaveKind::v, spec, part, x);
    REQUIRE(te.has_value());
    CHECK(*te >= prev);
    prev = *te;
  }
}

TEST_CASE("coupled mode at zero frequency decouples exactly") {
  const auto spec = DampingSpec::checked(1.3, -0.7);
  ModeState init;
  init.a = {0.8, 0.0};
  init.b_comp = {-0.4, 0.0};
  const auto st = integrate_mode(ModeSystem::coupled, spec, 0.0, 0.5, 20.0, init);
  CHECK(st.a.real() == Catch::Approx(0.8).epsilon(1e-12));
  const double factor = std::exp(-damping_integral(spec, 0.5, 20.0));
  CHECK(st.b_comp.real() == Catch::Approx(-0.4 * factor).epsilon(1e-10));
}

TEST_CASE("undamped wave mode conserves energy") {
  const auto spec = DampingSpec::unchecked(0.0, -0.5);  // test mode: b = 0
  const double xi = 2.0;
  ModeState init;
  init.a = {0.3, 0.0};
  init.b_comp = {0.7, 0.0};
  const auto st = integrate_mode(ModeSystem::wave_v, spec, xi, 0.0, 37.0, init);
  const double e0 = std::norm(init.a) + std::norm(init.b_comp / xi);
  const double e1 = std::norm(st.a) + std::norm(st.b_comp / xi);
  CHECK(std::abs(e1 - e0) / e0 < 1e-8);
}

TEST_CASE("multipliers at t = s are the identity columns") {
  const auto spec = DampingSpec::checked(0.9, -0.25);
  const auto m = compute_multipliers(ModeSystem::wave_u, spec, 1.5, 4.0, 4.0);
  CHECK(m.phi1 == cplx{1.0, 0.0});
  CHECK(m.phi2 == cplx{0.0, 0.0});
}

TEST_CASE("peano-baker identity and one-term expansion") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  auto id = peano_baker_green(spec, 0.7, 2.0, 2.0, 5);
  CHECK(id.g.a11 == cplx{1.0, 0.0});
  CHECK(id.g.a12 == cplx{0.0, 0.0});

  // One term: I + int_s^t A = I + [[0, -i xi dt], [-i xi dt, -int b]].
  const double s = 1.0, t = 1.08, xi = 0.6;
  auto one = peano_baker_green(spec, xi, s, t, 1);
  CHECK(one.g.a11.real() == Catch::Approx(1.0));
  CHECK(one.g.a12.imag() == Catch::Approx(-xi * (t - s)).epsilon(1e-12));
  CHECK(one.g.a21.imag() == Catch::Approx(-xi * (t - s)).epsilon(1e-12));
  CHECK(one.g.a22.real() ==
        Catch::Approx(1.0 - damping_integral(spec, s, t)).epsilon(1e-12));
  CHECK_FALSE(one.converged);  // one term cannot be converged here
}

TEST_CASE("integrate_mode agrees with the peano-baker oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> umu(0.2, 2.0), us(0.0, 5.0),
      udt(0.01, 0.1), uxi(0.0, 1.0);
  const double lambdas[3] = {-0.25, -0.5, -1.0};
  for (int i = 0; i < 40; ++i) {
    const auto spec = DampingSpec::checked(umu(rng), lambdas[i % 3]);
    const double s = us(rng), t = s + udt(rng), xi = uxi(rng);
    auto pb = peano_baker_coupled_real(spec, xi, s, t, 14);
    REQUIRE(pb.converged);
    REQUIRE(pb.imag_leak < 1e-12);
    const double times[1] = {t};
    auto prop = propagate_mode(ModeSystem::coupled, spec, xi, s, times);
    const Mat2& g = prop.at_times[0];
    CHECK(std::abs(g.a11 - pb.m.a11) < 1e-8);
    CHECK(std::abs(g.a12 - pb.m.a12) < 1e-8);
    CHECK(std::abs(g.a21 - pb.m.a21) < 1e-8);
    CHECK(std::abs(g.a22 - pb.m.a22) < 1e-8);
  }
}

TEST_CASE("determinant law along integrations") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  for (double xi : {0.0, 0.3, 2.0, 20.0}) {
    std::vector<double> times;
    for (double t : {0.5, 2.0, 10.0, 50.0, 200.0}) times.push_back(t);
    auto prop = propagate_mode(ModeSystem::coupled, spec, xi, 0.0, times);
    CHECK(prop.stats.det_defect_entry < 1e-6);
    CHECK(prop.stats.det_defect_log < 1e-6);
  }
}

TEST_CASE("long-horizon critical-case integration stays sane") {
  const auto spec = DampingSpec::checked(1.0, -1.0);
  std::vector<double> times{1e2, 1e4, 1e6, 1e8, 1e10};
  auto prop = propagate_mode(ModeSystem::coupled, spec, 0.01, 0.0, times);
  // G11 tracks the elliptic low-frequency law exp(-C xi^2 int 1/b):
  // values stay in (0,1], decreasing.
  double prev = 1.0;
  for (const auto& g : prop.at_times) {
    CHECK(g.a11 <= prev + 1e-12);
    CHECK(g.a11 > 0.0);
    prev = g.a11;
  }
  CHECK(prop.stats.det_defect_log < 1e-5);
}

TEST_CASE("wave multipliers track the elliptic envelope ratio b(s)/b(t)") {
  const auto spec = DampingSpec::checked(1.0, -0.5);
  const double s = 50.0, t = 5000.0;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (double xi : {0.001, 0.003, 0.01}) {
    const auto mv = compute_multipliers(ModeSystem::wave_v, spec, xi, s, t);
    const auto mu = compute_multipliers(ModeSystem::wave_u, spec, xi, s, t);
    const double r = std::abs(mu.phi1) / std::abs(mv.phi1);
    const double predicted = b_of_t(spec, s) / b_of_t(spec, t);
    ratio_lo = std::min(ratio_lo, r / predicted);
    ratio_hi = std::max(ratio_hi, r / predicted);
  }
  CHECK(ratio_hi / ratio_lo < 3.0);  // stable across the frequency decade
  CHECK(ratio_hi < 10.0);
  CHECK(ratio_lo > 0.1);
}

TEST_CASE("vorticity mode closed form") {
  const auto spec = DampingSpec::checked(1.0, -1.0);
  CHECK(vorticity_mode(spec, 3.0, 3.0, {0.5, 0.0}).real() == 0.5);
  const auto w = vorticity_mode(spec, 0.0, 9.0, {1.0, 0.0});
  CHECK(std::log(std::abs(w)) == Catch::Approx(-49.5).epsilon(1e-12));
}

TEST_CASE("low-frequency multiplier envelope with fitted constants") {
  // |Phi_1^v(t,s,xi)| <= C exp(-C' xi^2 int_s^t 1/b): fit (C, C') over a
  // decade of xi and check stability across a second decade.
  const auto spec = DampingSpec::checked(1.0, -0.5);
  const double s = 20.0, t = 2e4;
  const double integral = inverse_damping_integral(spec, s, t);
  auto fit_on = [&](double xi_lo, double xi_hi) {
    // ln|Phi| = ln C - C' xi^2 I: least squares in xi^2.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double xi = xi_lo; xi <= xi_hi * 1.0001; xi *= 1.5) {
      const auto m = compute_multipliers(ModeSystem::wave_v, spec, xi, s, t);
      const double x = xi * xi * integral;
      const double y = std::log(std::abs(m.phi1));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double inter = (sy - slope * sx) / n;
    return std::pair<double, double>{std::exp(inter), -slope};
  };
  auto [c1, cp1] = fit_on(1e-3, 1e-2);
  auto [c2, cp2] = fit_on(1e-2, 1e-1);
  CHECK(cp1 > 0.0);
  CHECK(cp2 > 0.0);
  CHECK(std::abs(cp1 - cp2) / cp1 < 0.5);  // same decay constant across decades
  CHECK(c1 < 10.0);
  CHECK(c2 < 10.0);
}
