#pragma once

#include <random>
#include <string>

namespace leo {

// Shadowed-Rician fading: squared envelope of A e^{i phi} + Z where the LOS
// amplitude A^2 is Gamma(m, omega/m) (Nakagami-shadowed) and Z is complex
// Gaussian with total scattered power 2b.
struct shadowed_rician_params {
  double b = 0.126;
  double m = 10.1;
  double omega = 0.835;
};

// Named parameter sets used throughout: "fhs-paper", "fhs-canonical" (alias
// "fhs"), "as", "ils". Throws validation_error for unknown names.
shadowed_rician_params fading_preset(const std::string& name);

struct series_control {
  int n_max = 20000;
  double tol = 1e-12;  // absolute tolerance on the summed probability
};

// The fading CDF expands as F(x) = sum_n A_n P(1+n, x/2b) where the weights
// A_n form a negative-binomial mass: A_0 = (1-q)^m, A_{n+1} = A_n (m+n) q /
// (n+1) with q = omega / (2 b m + omega). They are nonnegative and sum to
// one, which keeps every partial sum and truncation bound inside [0, 1].
class sr_weight_series {
 public:
  explicit sr_weight_series(const shadowed_rician_params& p);
  int index() const { return n_; }
  double weight() const { return a_; }      // A_n
  double cum() const { return cum_; }       // A_0 + ... + A_n
  double tail() const { return 1.0 - cum_; }
  void advance();

 private:
  double m_ = 0.0;
  double q_ = 0.0;
  double a_ = 0.0;
  double cum_ = 0.0;
  int n_ = 0;
};

// CDF of the squared envelope at x >= 0. Truncation stops once both the last
// added term and the rigorous tail bound tail_A(N) * P(N+2, x/2b) fall below
// ctl.tol; throws convergence_not_reached if ctl.n_max terms do not suffice.
double sr_cdf(double x, const shadowed_rician_params& p,
              const series_control& ctl = {});

// One draw of the squared envelope.
double sr_sample(const shadowed_rician_params& p, std::mt19937_64& rng);

// Sectorized satellite transmit gain: main lobe inside |omega_s| <= omega_th
// (boundary inclusive), side lobe outside.
double tx_gain(double omega_s, double omega_th, double g_ml, double g_sl);

// VSAT receive-gain mask versus pointing error (degrees): g_max below 1 deg,
// 10^(3.2) * omega^-2.5 from 1 to 48 deg, -10 dB out to 180 deg.
double vsat_rx_gain(double omega_e_deg, double g_max);

// Free-space style power gain (c / 4 pi f_c)^2 d^-alpha.
double path_loss(double d, double f_c, double alpha,
                 double light_speed = 299792458.0);

// Everything needed to turn a rate into a fading threshold.
struct link_budget {
  double tx_power = 0.0;       // P [W]
  double g_t_ml = 1.0;         // satellite main-lobe tx gain (linear)
  double g_t_sl = 1.0;         // satellite side-lobe tx gain (linear)
  double g_r = 1.0;            // receive gain after pointing loss (linear)
  double rain_g = 1.0;         // rain attenuation (linear, 0 < g <= 1)
  double f_c = 20.0e9;         // carrier [Hz]
  double bandwidth = 100.0e6;  // W [Hz]
  double alpha = 2.0;          // path-loss exponent
  double noise_density = 3.9810717055349565e-21;  // N0 [W/Hz]
  double light_speed = 299792458.0;
};

struct snr_coeffs {
  double w1 = 0.0;  // main-lobe threshold coefficient: outage iff h < w1 d^alpha
  double w2 = 0.0;  // side-lobe equivalent
};

// w = (2^R - 1) N0 W (4 pi f_c / c)^2 / (P g G_t G_r); rate R in bps/Hz.
snr_coeffs snr_coefficients(const link_budget& lb, double rate);

}  // namespace leo
