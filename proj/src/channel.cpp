#include "leo/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "leo/errors.hpp"

namespace leo {

namespace {

constexpr double pi = std::numbers::pi;

void check_params(const shadowed_rician_params& p) {
  if (!(p.b > 0.0) || !(p.m > 0.0) || !(p.omega > 0.0))
    throw domain_error("shadowed-Rician parameters must be positive");
}

}  // namespace

shadowed_rician_params fading_preset(const std::string& name) {
  if (name == "fhs-paper") return {0.063, 0.739, 8.97e4};
  if (name == "fhs-canonical" || name == "fhs") return {0.063, 0.739, 8.97e-4};
  if (name == "as") return {0.126, 10.1, 0.835};
  if (name == "ils") return {0.158, 19.4, 1.29};
  throw validation_error("unknown fading preset '" + name + "'");
}

sr_weight_series::sr_weight_series(const shadowed_rician_params& p) {
  check_params(p);
  m_ = p.m;
  q_ = p.omega / (2.0 * p.b * p.m + p.omega);
  a_ = std::exp(p.m * std::log1p(-q_));
  cum_ = a_;
}

void sr_weight_series::advance() {
  a_ *= (m_ + static_cast<double>(n_)) * q_ / (static_cast<double>(n_) + 1.0);
  cum_ += a_;
  ++n_;
}

double sr_cdf(double x, const shadowed_rician_params& p,
              const series_control& ctl) {
  check_params(p);
  if (!(x >= 0.0)) throw domain_error("sr_cdf requires x >= 0");
  if (x == 0.0) return 0.0;

  const double z = x / (2.0 * p.b);
  // Poisson-tail ladder: p_n = P(1+n, z), stepping down by the Poisson mass
  // t_n = z^{n+1} e^{-z} / (n+1)!.
  double pn = -std::expm1(-z);
  double t = std::exp(std::log(z) - z);  // z e^{-z}, underflow-safe for big z
  sr_weight_series w(p);

  double sum = 0.0, comp = 0.0;
  for (int n = 0;; ++n) {
    const double term = w.weight() * pn;
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;

    // Remainder after term n is bounded by tail_A(n) * P(n+2, z): the weight
    // tail times the largest remaining ladder value.
    const double p_next = std::fmax(pn - t, 0.0);
    if (term < ctl.tol && w.tail() * p_next < ctl.tol) break;
    if (n + 1 >= ctl.n_max)
      throw convergence_not_reached(
          "sr_cdf series needs more than " + std::to_string(ctl.n_max) +
          " terms (tail bound " + std::to_string(w.tail() * p_next) + ")");
    pn = p_next;
    t *= z / (static_cast<double>(n) + 2.0);
    w.advance();
  }
  return std::fmin(std::fmax(sum, 0.0), 1.0);
}

double sr_sample(const shadowed_rician_params& p, std::mt19937_64& rng) {
  check_params(p);
  std::gamma_distribution<double> los_power(p.m, p.omega / p.m);
  std::normal_distribution<double> scatter(0.0, std::sqrt(p.b));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  const double amp = std::sqrt(los_power(rng));
  const double phi = phase(rng);
  const double re = amp * std::cos(phi) + scatter(rng);
  const double im = amp * std::sin(phi) + scatter(rng);
  return re * re + im * im;
}

double tx_gain(double omega_s, double omega_th, double g_ml, double g_sl) {
  if (!(omega_th >= 0.0)) throw domain_error("omega_th must be >= 0");
  if (!(g_ml > 0.0) || !(g_sl > 0.0))
    throw domain_error("antenna gains must be positive");
  return std::fabs(omega_s) <= omega_th ? g_ml : g_sl;
}

double vsat_rx_gain(double omega_e_deg, double g_max) {
  if (!(g_max > 0.0)) throw domain_error("g_max must be positive");
  if (!(omega_e_deg >= 0.0) || !(omega_e_deg <= 180.0))
    throw domain_error("pointing error must lie in [0, 180] degrees");
  if (omega_e_deg < 1.0) return g_max;
  if (omega_e_deg < 48.0)
    return std::pow(10.0, 3.2) * std::pow(omega_e_deg, -2.5);
  return 0.1;
}

double path_loss(double d, double f_c, double alpha, double light_speed) {
  if (!(d > 0.0) || !(f_c > 0.0) || !(light_speed > 0.0))
    throw domain_error("path_loss requires positive d, f_c, c");
  if (!(alpha >= 2.0)) throw domain_error("alpha must be >= 2");
  const double k = light_speed / (4.0 * pi * f_c);
  return k * k * std::pow(d, -alpha);
}

snr_coeffs snr_coefficients(const link_budget& lb, double rate) {
  if (!(rate >= 0.0)) throw domain_error("rate must be >= 0");
  if (!(lb.tx_power > 0.0) || !(lb.g_t_ml > 0.0) || !(lb.g_t_sl > 0.0) ||
      !(lb.g_r > 0.0) || !(lb.f_c > 0.0) || !(lb.bandwidth > 0.0) ||
      !(lb.noise_density > 0.0) || !(lb.light_speed > 0.0))
    throw domain_error("link budget fields must be positive");
  if (!(lb.rain_g > 0.0) || !(lb.rain_g <= 1.0))
    throw domain_error("rain attenuation must lie in (0, 1]");
  if (!(lb.alpha >= 2.0)) throw domain_error("alpha must be >= 2");
  const double snr_gap = std::exp2(rate) - 1.0;
  const double k = 4.0 * pi * lb.f_c / lb.light_speed;
  const double num = snr_gap * lb.noise_density * lb.bandwidth * k * k;
  const double den = lb.tx_power * lb.rain_g * lb.g_r;
  return {num / (den * lb.g_t_ml), num / (den * lb.g_t_sl)};
}

}  // namespace leo
