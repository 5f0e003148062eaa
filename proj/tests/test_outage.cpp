#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "leo/channel.hpp"
#include "leo/distributions.hpp"
#include "leo/errors.hpp"
#include "leo/gamma.hpp"
#include "leo/geometry.hpp"
#include "leo/outage.hpp"
#include "leo/quadrature.hpp"

namespace {

constexpr double pi = 3.14159265358979323846;

double deg(double d) { return d * pi / 180.0; }

// Ka-band dish terminal: EIRP density 4 dBW/MHz over 100 MHz, 38.5/28.5 dBi
// transmit lobes, 39.7 dBi receive gain at boresight.
leo::link_budget vsat_budget() {
  leo::link_budget b;
  b.f_c = 20.0e9;
  b.bandwidth = 100.0e6;
  b.g_t_ml = std::pow(10.0, 3.85);
  b.g_t_sl = std::pow(10.0, 2.85);
  b.g_r = std::pow(10.0, 3.97);
  b.tx_power = std::pow(10.0, 0.4) * 100.0 / b.g_t_ml;
  b.rain_g = 1.0;
  b.alpha = 2.0;
  b.light_speed = 3.0e8;
  return b;
}

// S-band omnidirectional terminal: EIRP density 34 dBW/MHz over 10 MHz,
// 30/20 dBi transmit lobes, 0 dBi receive gain.
leo::link_budget handheld_budget() {
  leo::link_budget b;
  b.f_c = 2.0e9;
  b.bandwidth = 10.0e6;
  b.g_t_ml = 1.0e3;
  b.g_t_sl = 1.0e2;
  b.g_r = 1.0;
  b.tx_power = std::pow(10.0, 3.4) * 10.0 / b.g_t_ml;
  b.rain_g = 1.0;
  b.alpha = 2.0;
  b.light_speed = 3.0e8;
  return b;
}

leo::link_scene make_scene(int sat_count, const char* fading,
                           const leo::link_budget& budget) {
  leo::link_scene sc;
  sc.earth = {6378.0e3, 600.0e3};
  sc.theta_min = deg(10.0);
  sc.omega_th = deg(20.0);
  sc.sat_count = sat_count;
  sc.fading = leo::fading_preset(fading);
  sc.budget = budget;
  return sc;
}

}  // namespace

TEST_SUITE("outage") {

TEST_CASE("zero rate gives zero outage on every route") {
  const leo::link_scene sc = make_scene(25, "as", vsat_budget());
  const leo::outage_result routes[4] = {
      leo::outage_exact(sc, 0.0), leo::outage_exact_closed_form(sc, 0.0),
      leo::outage_approx(sc, 0.0), leo::outage_approx_alpha2(sc, 0.0)};
  for (const auto& r : routes) {
    CHECK(r.p_out == 0.0);
    CHECK(r.p_out_ml == 0.0);
    CHECK(r.p_out_sl == 0.0);
    CHECK(r.n_used == 0);
  }
  CHECK(routes[0].method == leo::outage_method::exact_quadrature);
  CHECK(routes[1].method == leo::outage_method::exact_closed);
  CHECK(routes[2].method == leo::outage_method::approx);
  CHECK(routes[3].method == leo::outage_method::approx_alpha2);
  CHECK(leo::outage_asymptotic(sc, 0.0) == 0.0);
  CHECK(leo::series_increment(3, sc, 0.0).combined == 0.0);
}

TEST_CASE("negative arguments are rejected") {
  const leo::link_scene sc = make_scene(10, "as", vsat_budget());
  CHECK_THROWS_AS((void)leo::outage_exact(sc, -0.5), leo::domain_error);
  CHECK_THROWS_AS((void)leo::series_increment(-1, sc, 1.0),
                  leo::domain_error);
}

// Independent oracle at the CDF level: the conditional outage is the serving
// distance expectation of the full fading CDF, so integrating
// sr_cdf(w x^alpha) against the serving densities in plain x must reproduce
// the series-expanded evaluation.
TEST_CASE("series evaluation matches a direct fading-CDF integral") {
  const double rate = 1.0;
  for (const auto model : {leo::pp_model::exact, leo::pp_model::approx}) {
    const leo::link_scene sc = make_scene(10, "as", vsat_budget());
    const leo::geometry_derived der =
        leo::derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
    const leo::snr_coeffs w = leo::snr_coefficients(sc.budget, rate);
    const auto ml_density = [&](double x) {
      return leo::serving_ml_dist(x, sc.sat_count, sc.earth, der, model).pdf;
    };
    const auto sl_density = [&](double x) {
      return leo::serving_sl_dist(x, sc.sat_count, sc.earth, der, model).pdf;
    };
    const double oracle_ml =
        leo::integrate(
            [&](double x) {
              return leo::sr_cdf(w.w1 * x * x, sc.fading) * ml_density(x);
            },
            sc.earth.a, der.d_th, 1e-11)
            .value;
    const double oracle_sl =
        leo::integrate(
            [&](double x) {
              return leo::sr_cdf(w.w2 * x * x, sc.fading) * sl_density(x);
            },
            der.d_th, der.d_max, 1e-11)
            .value;
    const leo::outage_result got = model == leo::pp_model::exact
                                       ? leo::outage_exact(sc, rate)
                                       : leo::outage_approx(sc, rate);
    CHECK(got.p_out_ml == doctest::Approx(oracle_ml).epsilon(1e-8));
    CHECK(got.p_out_sl == doctest::Approx(oracle_sl).epsilon(1e-8));
    const leo::case_probabilities cp =
        leo::case_probs(sc.sat_count, sc.earth, der, model);
    const double mixture =
        (cp.p_ml * oracle_ml + cp.p_sl * oracle_sl) / cp.p_vis();
    CHECK(got.p_out == doctest::Approx(mixture).epsilon(1e-8));
  }
}

TEST_CASE("closed form matches the quadrature path for small constellations") {
  const double rate = 0.5;
  for (const int s : {1, 5, 10, 20}) {
    leo::link_scene sc = make_scene(s, "as", vsat_budget());
    const leo::outage_result quad = leo::outage_exact(sc, rate);
    const leo::outage_result closed = leo::outage_exact_closed_form(sc, rate);
    CHECK(closed.method == leo::outage_method::exact_closed);
    const double tol = s == 1 ? 1e-12 : 1e-8;
    CHECK(std::fabs(closed.p_out - quad.p_out) < tol);
    CHECK(std::fabs(closed.p_out_ml - quad.p_out_ml) < tol);
    CHECK(std::fabs(closed.p_out_sl - quad.p_out_sl) < tol);
  }
}

TEST_CASE("closed form refuses constellations past the cancellation budget") {
  const leo::link_scene big = make_scene(100, "as", vsat_budget());
  CHECK_THROWS_AS((void)leo::outage_exact_closed_form(big, 1.0),
                  leo::cancellation_overflow);
  // The cap is a parameter, not a hard-coded magic constant.
  const leo::link_scene mid = make_scene(10, "as", vsat_budget());
  CHECK_THROWS_AS((void)leo::outage_exact_closed_form(mid, 1.0, {}, 5),
                  leo::cancellation_overflow);
  CHECK_NOTHROW((void)leo::outage_exact_closed_form(mid, 1.0, {}, 15));
}

TEST_CASE("Poisson limit tracks the exact law across rates and environments") {
  for (const char* preset : {"fhs-canonical", "as", "ils"}) {
    for (const double rate : {0.25, 0.75, 1.5, 2.25, 3.0}) {
      const leo::link_scene sc = make_scene(100, preset, vsat_budget());
      const double exact = leo::outage_exact(sc, rate).p_out;
      const double approx = leo::outage_approx(sc, rate).p_out;
      CHECK(std::fabs(exact - approx) < 0.01);
    }
  }
}

TEST_CASE("alpha = 2 closed route equals the generic Poisson route") {
  for (const char* preset : {"fhs-canonical", "as", "ils"}) {
    for (const int s : {20, 100}) {
      for (const double rate : {0.5, 1.0, 2.0}) {
        for (const bool handheld : {false, true}) {
          const leo::link_scene sc = make_scene(
              s, preset, handheld ? handheld_budget() : vsat_budget());
          const leo::outage_result generic = leo::outage_approx(sc, rate);
          const leo::outage_result closed = leo::outage_approx_alpha2(sc, rate);
          CHECK(std::fabs(generic.p_out - closed.p_out) < 1e-10);
          CHECK(std::fabs(generic.p_out_ml - closed.p_out_ml) < 1e-10);
          CHECK(std::fabs(generic.p_out_sl - closed.p_out_sl) < 1e-10);
        }
      }
    }
  }
  const leo::link_scene sc = make_scene(50, "as", vsat_budget());
  leo::link_scene bent = sc;
  bent.budget.alpha = 2.5;
  CHECK_THROWS_AS((void)leo::outage_approx_alpha2(bent, 1.0),
                  leo::domain_error);
}

TEST_CASE("case integrals: quadrature against the alpha = 2 closed form") {
  const leo::link_scene sc = make_scene(100, "as", vsat_budget());
  for (const int n : {0, 1, 5}) {
    for (const auto which : {leo::link_case::mainlobe,
                             leo::link_case::sidelobe}) {
      const double by_quad = leo::approx_case_integral(sc, 1.0, n, which);
      const double by_form =
          leo::approx_case_integral_alpha2(sc, 1.0, n, which);
      REQUIRE(by_form > 0.0);
      CHECK(std::fabs(by_quad - by_form) <= 1e-10 * by_form);
    }
  }
}

TEST_CASE("case integral shift factor collapses when the threshold dwarfs it") {
  // The shift 1 + 2 S b / (w1 4 r_e (r_e+a)) multiplies gamma arguments of
  // size w1 a^2 / 2b, so its visible effect scales with S a^2 / (4 r_e
  // (r_e+a)) no matter how large the rate pushes w1. A low shell makes that
  // coupling negligible and the case integral must then reduce to a plain
  // regularized-gamma difference.
  leo::link_scene sc = make_scene(1, "as", vsat_budget());
  sc.earth.a = 600.0;
  const leo::geometry_derived der =
      leo::derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
  const double two_b = 2.0 * sc.fading.b;
  // Solve for the rate that puts w1 a^2 / 2b in the bulk of the gamma CDF.
  const double unit_w1 = leo::snr_coefficients(sc.budget, 1.0).w1;
  const double w1_target = 2.0 * two_b / (sc.earth.a * sc.earth.a);
  const double rate = std::log2(1.0 + w1_target / unit_w1);
  const double w1 = leo::snr_coefficients(sc.budget, rate).w1;
  const double fourth = 4.0 * sc.earth.r_e * sc.earth.orbit_radius();
  const double shift = 2.0 * sc.fading.b / (w1 * fourth);
  REQUIRE(shift < 1e-8);
  const double z_lo = w1 * sc.earth.a * sc.earth.a / two_b;
  const double z_hi = w1 * der.d_th * der.d_th / two_b;
  REQUIRE(z_lo > 0.5);
  REQUIRE(z_hi < 20.0);
  const double ea = std::exp(sc.earth.a * sc.earth.a / fourth);
  for (const int n : {0, 2}) {
    const double plain = ea * leo::gamma_p_diff(1.0 + n, z_lo, z_hi);
    const double closed = leo::approx_case_integral_alpha2(
        sc, rate, n, leo::link_case::mainlobe);
    REQUIRE(plain > 0.0);
    CHECK(closed == doctest::Approx(plain).epsilon(1e-6));
  }
}

TEST_CASE("large constellations approach the nadir-distance asymptote") {
  leo::link_scene sc = make_scene(10000, "ils", handheld_budget());
  const double rate = 1.0;
  const double asym = leo::outage_asymptotic(sc, rate);
  REQUIRE(asym > 0.0);
  CHECK(std::fabs(leo::outage_approx(sc, rate).p_out - asym) < 1e-3);
  // The asymptote floors the whole family: more satellites can only shorten
  // the serving distance towards the nadir range a.
  for (const int s : {10, 100, 1000, 10000}) {
    sc.sat_count = s;
    CHECK(leo::outage_approx(sc, rate).p_out >= asym - 1e-9);
  }
}

TEST_CASE("series increments equal truncation differences") {
  const leo::link_scene sc = make_scene(100, "as", vsat_budget());
  const double rate = 1.0;
  for (const int n : {1, 5, 20}) {
    const leo::series_delta d = leo::series_increment(n, sc, rate);
    const double hi = leo::outage_approx_truncated(sc, rate, n).p_out;
    const double lo = leo::outage_approx_truncated(sc, rate, n - 1).p_out;
    CHECK(d.combined == doctest::Approx(hi - lo).epsilon(1e-9));
    CHECK(d.combined >= 0.0);
  }
  // Term 0 is the first partial sum itself.
  const leo::series_delta d0 = leo::series_increment(0, sc, rate);
  CHECK(d0.combined ==
        doctest::Approx(leo::outage_approx_truncated(sc, rate, 0).p_out)
            .epsilon(1e-12));
}

TEST_CASE("series increments decay at useful truncation depths") {
  const leo::link_scene sc = make_scene(100, "as", vsat_budget());
  const double rate = 1.0;
  std::vector<double> mags;
  for (int n = 20; n <= 60; n += 5)
    mags.push_back(std::fabs(leo::series_increment(n, sc, rate).combined));
  for (size_t i = 0; i + 1 < mags.size(); ++i) CHECK(mags[i + 1] < mags[i]);
  for (const int n : {40, 60, 90, 140, 200})
    CHECK(std::fabs(leo::series_increment(n, sc, rate).combined) < 1e-6);
}

TEST_CASE("outage grows with rate") {
  const leo::link_scene dish = make_scene(100, "as", vsat_budget());
  const leo::link_scene hand = make_scene(100, "ils", handheld_budget());
  for (const auto& sc : {dish, hand}) {
    CHECK(leo::outage_exact(sc, 2.0).p_out > leo::outage_exact(sc, 1.0).p_out);
    CHECK(leo::outage_approx(sc, 2.0).p_out >
          leo::outage_approx(sc, 1.0).p_out);
  }
}

TEST_CASE("reported split recombines into the reported mixture") {
  for (const double omega_deg : {0.5, 20.0, 69.0}) {
    leo::link_scene sc = make_scene(30, "ils", handheld_budget());
    sc.omega_th = deg(omega_deg);
    const leo::geometry_derived der =
        leo::derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
    for (const auto model : {leo::pp_model::exact, leo::pp_model::approx}) {
      const leo::case_probabilities cp =
          leo::case_probs(sc.sat_count, sc.earth, der, model);
      const leo::outage_result r = model == leo::pp_model::exact
                                       ? leo::outage_exact(sc, 1.0)
                                       : leo::outage_approx(sc, 1.0);
      const double mix =
          (cp.p_ml * r.p_out_ml + cp.p_sl * r.p_out_sl) / cp.p_vis();
      CHECK(std::fabs(r.p_out - mix) < 1e-10);
    }
  }
  // A beam covering the whole cap leaves no side-lobe mass: the side
  // conditional reports zero and the mixture collapses to the main lobe.
  leo::link_scene wide = make_scene(30, "ils", handheld_budget());
  wide.omega_th = deg(69.0);
  const leo::outage_result r = leo::outage_exact(wide, 1.0);
  CHECK(r.p_out_sl == 0.0);
  CHECK(r.p_out == doctest::Approx(r.p_out_ml).epsilon(1e-12));
}

TEST_CASE("tiny term budgets are reported, not silently truncated") {
  const leo::link_scene sc = make_scene(100, "as", vsat_budget());
  leo::series_control ctl;
  ctl.n_max = 2;
  CHECK_THROWS_AS((void)leo::outage_exact(sc, 1.0, ctl),
                  leo::convergence_not_reached);
}

// Brute-force Monte-Carlo oracle for the flagship scenario: satellites drawn
// uniformly on the shell via cos(psi) ~ U[-1, 1], nearest visible one
// serving, fading drawn from the physical channel model, conditioned on
// visibility by discarding empty realizations.
TEST_CASE("analytic outage matches a brute-force simulation") {
  const leo::link_scene sc = make_scene(100, "ils", handheld_budget());
  const double rate = 1.0;
  const leo::geometry_derived der =
      leo::derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
  const leo::snr_coeffs w = leo::snr_coefficients(sc.budget, rate);
  const double cos_psi_max = std::cos(der.psi_max);
  const double cos_psi_th = std::cos(der.psi_th);
  std::mt19937_64 rng(20260814ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int wanted = 1000000;
  int kept = 0;
  long long outages = 0;
  while (kept < wanted) {
    double best = -2.0;
    for (int i = 0; i < sc.sat_count; ++i) best = std::max(best, uni(rng));
    if (best < cos_psi_max) continue;  // no visible satellite
    ++kept;
    const double psi = std::acos(std::min(best, 1.0));
    const double d = leo::threshold_distance(sc.earth, psi);
    const double coeff = best >= cos_psi_th ? w.w1 : w.w2;
    const double h = leo::sr_sample(sc.fading, rng);
    if (h < coeff * d * d) ++outages;
  }
  const double freq = static_cast<double>(outages) / wanted;
  const double se = std::sqrt(freq * (1.0 - freq) / wanted);
  const double analytic = leo::outage_exact(sc, rate).p_out;
  CHECK(std::fabs(analytic - freq) <= 3.0 * se + 1e-12);
}

}  // TEST_SUITE
