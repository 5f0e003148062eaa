#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "leo/channel.hpp"
#include "leo/errors.hpp"

using namespace leo;

namespace {

std::vector<double> draw_sr(const shadowed_rician_params& p, int n,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sr_sample(p, rng);
  return v;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    sup = std::max(sup, std::fabs(fa - fb));
  }
  return sup;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("weight series is a probability mass") {
  for (const char* name : {"as", "ils", "fhs-canonical"}) {
    const shadowed_rician_params p = fading_preset(name);
    sr_weight_series w(p);
    const double q = p.omega / (2.0 * p.b * p.m + p.omega);
    CHECK(w.weight() == doctest::Approx(std::pow(1.0 - q, p.m)).epsilon(1e-12));
    for (int n = 0; n < 400; ++n) {
      CHECK(w.weight() >= 0.0);
      w.advance();
    }
    CHECK(w.cum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.tail() < 1e-12);
  }
  // The heavy-LOS paper variant keeps q strictly below one.
  const shadowed_rician_params fhs = fading_preset("fhs-paper");
  const double q = fhs.omega / (2.0 * fhs.b * fhs.m + fhs.omega);
  CHECK(q < 1.0);
  CHECK(q > 1.0 - 2e-6);
}

TEST_CASE("cdf endpoints and monotonicity") {
  const shadowed_rician_params as = fading_preset("as");
  CHECK(sr_cdf(0.0, as) == 0.0);
  CHECK_THROWS_AS(sr_cdf(-1.0, as), domain_error);
  CHECK(sr_cdf(30.0, as) > 1.0 - 1e-6);
  CHECK(sr_cdf(40.0, fading_preset("ils")) > 1.0 - 1e-6);

  double prev = 0.0;
  for (double x = 0.0; x <= 6.0; x += 0.05) {
    const double f = sr_cdf(x, as);
    CHECK(f >= prev);
    CHECK(f <= 1.0);
    prev = f;
  }
}

TEST_CASE("tight vs loose tolerance agree") {
  const shadowed_rician_params ils = fading_preset("ils");
  for (double x : {0.2, 1.0, 2.5}) {
    const double loose = sr_cdf(x, ils, {20000, 1e-6});
    const double tight = sr_cdf(x, ils, {20000, 1e-13});
    CHECK(std::fabs(loose - tight) < 1e-5);
  }
}

TEST_CASE("cdf at the empirical median is one half") {
  const shadowed_rician_params as = fading_preset("as");
  const int n = 10'000'000;
  std::vector<double> v = draw_sr(as, n, 0xC0FFEE01);
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double median = v[n / 2];
  const double stderr_f = std::sqrt(0.25 / n);
  CHECK(std::fabs(sr_cdf(median, as) - 0.5) < 3.0 * stderr_f + 1e-6);
}

TEST_CASE("cdf tracks the empirical distribution under heavy shadowing") {
  const shadowed_rician_params fhs = fading_preset("fhs-canonical");
  const int n = 10'000'000;
  std::vector<double> v = draw_sr(fhs, n, 0xC0FFEE02);
  std::sort(v.begin(), v.end());
  double sup = 0.0;
  for (double x = 0.01; x <= 1.2; x += 0.03) {
    const auto it = std::upper_bound(v.begin(), v.end(), x);
    const double ecdf = static_cast<double>(it - v.begin()) / n;
    sup = std::max(sup, std::fabs(ecdf - sr_cdf(x, fhs)));
  }
  CHECK(sup < 4e-3);
}

TEST_CASE("vanishing LOS power leaves the scattered power") {
  shadowed_rician_params p = fading_preset("as");
  p.omega = 1e-12;
  const int n = 1'000'000;
  std::vector<double> v = draw_sr(p, n, 0xC0FFEE03);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  // h is exponential with mean 2b in this limit, so sd == mean.
  const double se = 2.0 * p.b / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(mean - 2.0 * p.b) < 5.0 * se);
}

TEST_CASE("huge m degenerates to a fixed-LOS Rician") {
  shadowed_rician_params p = fading_preset("as");
  p.m = 1e6;
  const int n = 100'000;
  std::vector<double> a = draw_sr(p, n, 0xC0FFEE04);

  std::mt19937_64 rng(0xC0FFEE05);
  std::normal_distribution<double> scatter(0.0, std::sqrt(p.b));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::acos(-1.0));
  std::vector<double> b(n);
  const double amp = std::sqrt(p.omega);
  for (auto& x : b) {
    const double phi = phase(rng);
    const double re = amp * std::cos(phi) + scatter(rng);
    const double im = amp * std::sin(phi) + scatter(rng);
    x = re * re + im * im;
  }
  // 1% critical value for the two-sample statistic.
  const double crit = 1.628 * std::sqrt(2.0 / n);
  CHECK(ks_statistic(std::move(a), std::move(b)) < crit);
}

TEST_CASE("sectorized gain boundary is inclusive") {
  const double w = 0.349;  // 20 deg
  CHECK(tx_gain(0.0, w, 7079.0, 707.9) == 7079.0);
  CHECK(tx_gain(w, w, 7079.0, 707.9) == 7079.0);
  CHECK(tx_gain(-w, w, 7079.0, 707.9) == 7079.0);
  CHECK(tx_gain(std::nextafter(w, 1.0), w, 7079.0, 707.9) == 707.9);
  CHECK(tx_gain(1.0, w, 7079.0, 707.9) == 707.9);
}

TEST_CASE("receive mask by pointing error") {
  const double g_max = std::pow(10.0, 3.97);
  CHECK(vsat_rx_gain(0.0, g_max) == g_max);
  CHECK(vsat_rx_gain(0.5, g_max) == g_max);
  CHECK(vsat_rx_gain(1.0, g_max) ==
        doctest::Approx(std::pow(10.0, 3.2)).epsilon(1e-12));
  CHECK(vsat_rx_gain(100.0, g_max) == 0.1);
  CHECK(vsat_rx_gain(180.0, g_max) == 0.1);
  CHECK_THROWS_AS(vsat_rx_gain(180.5, g_max), domain_error);
  CHECK_THROWS_AS(vsat_rx_gain(-1.0, g_max), domain_error);
  // The rolloff lands within a percent of the floor where the pieces meet.
  CHECK(vsat_rx_gain(47.999, g_max) == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("path loss scaling and absolute level") {
  const double l1 = path_loss(600e3, 20e9, 2.0);
  const double l2 = path_loss(1200e3, 20e9, 2.0);
  CHECK(l1 / l2 == doctest::Approx(4.0).epsilon(1e-12));
  const double l3 = path_loss(600e3, 20e9, 3.0);
  CHECK(path_loss(1200e3, 20e9, 3.0) / l3 ==
        doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-12));
  // Free-space loss at 20 GHz / 600 km: 20 log10 d + 20 log10 f - 147.55.
  const double fspl_db = -10.0 * std::log10(l1);
  CHECK(fspl_db == doctest::Approx(174.03).epsilon(0.0005));
}

TEST_CASE("threshold coefficients") {
  link_budget lb;
  lb.tx_power = 0.0355;
  lb.g_t_ml = std::pow(10.0, 3.85);
  lb.g_t_sl = std::pow(10.0, 2.85);
  lb.g_r = std::pow(10.0, 3.97);
  lb.f_c = 20e9;
  lb.bandwidth = 100e6;

  const snr_coeffs zero = snr_coefficients(lb, 0.0);
  CHECK(zero.w1 == 0.0);
  CHECK(zero.w2 == 0.0);

  const snr_coeffs c = snr_coefficients(lb, 1.5);
  CHECK(c.w1 > 0.0);
  CHECK(c.w2 / c.w1 == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(snr_coefficients(lb, -0.1), domain_error);
}

TEST_CASE("threshold coefficient matches sampled outage at fixed range") {
  // Handheld-style budget, ILS fading, fixed slant range.
  link_budget lb;
  lb.tx_power = 25.119;
  lb.g_t_ml = 1000.0;
  lb.g_t_sl = 100.0;
  lb.g_r = 1.0;
  lb.f_c = 2e9;
  lb.bandwidth = 10e6;
  lb.light_speed = 3e8;
  const shadowed_rician_params ils = fading_preset("ils");

  const double d = 2.5e6;
  const snr_coeffs c = snr_coefficients(lb, 3.0);
  const double threshold = c.w1 * d * d;

  std::mt19937_64 rng(0xC0FFEE06);
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (sr_sample(ils, rng) < threshold) ++hits;
  const double p_hat = static_cast<double>(hits) / n;
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / n);
  CHECK(std::fabs(p_hat - sr_cdf(threshold, ils)) < 3.0 * se + 1e-7);
}

}  // TEST_SUITE
