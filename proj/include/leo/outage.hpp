#pragma once

#include "leo/channel.hpp"
#include "leo/distributions.hpp"
#include "leo/geometry.hpp"

namespace leo {

// Full downlink scenario: shell geometry, elevation mask, beam split,
// constellation size, fading environment and link budget.
struct link_scene {
  earth_geometry earth{};
  double theta_min = 0.17453292519943295;  // 10 degrees
  double omega_th = 0.3490658503988659;    // 20 degrees
  int sat_count = 1;
  shadowed_rician_params fading{};
  link_budget budget{};
};

enum class outage_method {
  exact_closed,
  exact_quadrature,
  approx,
  approx_alpha2,
  asymptotic,
};

struct outage_result {
  double p_out = 0.0;     // conditioned on at least one visible satellite
  double p_out_ml = 0.0;  // conditioned on main-lobe service (0 if impossible)
  double p_out_sl = 0.0;  // conditioned on side-lobe service (0 if impossible)
  int n_used = 0;         // last fading-series index summed
  outage_method method = outage_method::exact_quadrature;
};

enum class link_case { mainlobe, sidelobe };

// Exact (fixed-count shell) outage probability. Per series term the serving
// conditional P(1+n, w x^alpha / 2b) is integrated against the nearest-
// distance density, rewritten in the cap-fraction variable so the integrand
// never loses precision near x = a.
outage_result outage_exact(const link_scene& sc, double rate,
                           const series_control& ctl = {});

// Same quantity through the binomial-expansion closed form, evaluated in the
// log domain with signed compensated summation. Valid for small
// constellations only: above s_cap, or past max_decades decades of estimated
// cancellation (log10 of largest term over result), cancellation_overflow is
// thrown and the caller should fall back to outage_exact.
outage_result outage_exact_closed_form(const link_scene& sc, double rate,
                                       const series_control& ctl = {},
                                       int s_cap = 30,
                                       double max_decades = 12.0);

// Poisson-limit outage probability (same integral structure against the
// exponential void law).
outage_result outage_approx(const link_scene& sc, double rate,
                            const series_control& ctl = {});

// Poisson-limit outage in gamma closed form, available when alpha == 2
// exactly (throws domain_error otherwise).
outage_result outage_approx_alpha2(const link_scene& sc, double rate,
                                   const series_control& ctl = {});

// Large-constellation limit: every terminal is served from nadir range a, so
// the outage collapses to the fading CDF at w1 a^alpha.
double outage_asymptotic(const link_scene& sc, double rate,
                         const series_control& ctl = {});

// One term of the Poisson-limit series: the exact change in the truncated
// outage when term n is appended.
struct series_delta {
  double ml = 0.0;
  double sl = 0.0;
  double combined = 0.0;
};
series_delta series_increment(int n, const link_scene& sc, double rate);

// Poisson-limit outage truncated after term last_n (inclusive; -1 gives 0).
outage_result outage_approx_truncated(const link_scene& sc, double rate,
                                      int last_n);

// Normalized case integral of the Poisson-limit series term n,
// e^{S a^2 / (4 r_e (r_e+a))} * C_case[n] / Gamma(1+n), by adaptive
// quadrature on the gamma argument with the overflow-prone prefactor folded
// into the integrand. Exposed for cross-validation against the alpha = 2
// closed form.
double approx_case_integral(const link_scene& sc, double rate, int n,
                            link_case which);

// The same quantity via the alpha = 2 closed form (domain_error otherwise).
double approx_case_integral_alpha2(const link_scene& sc, double rate, int n,
                                   link_case which);

}  // namespace leo
