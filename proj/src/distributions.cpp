#include "leo/distributions.hpp"

#include <cmath>
#include <string>

#include "leo/errors.hpp"

namespace leo {

namespace {

void check_count(int sat_count) {
  if (sat_count < 1)
    throw domain_error("satellite count must be >= 1, got " +
                       std::to_string(sat_count));
}

// Probability that none of the satellites lands in a cap of fraction v.
double void_prob(double v, int s, pp_model model) {
  if (model == pp_model::exact) return std::exp(s * std::log1p(-v));
  return std::exp(-static_cast<double>(s) * v);
}

// d/dx of the nearest-distance cdf at cap fraction v and range x.
double nearest_pdf(double v, double x, int s, const earth_geometry& g,
                   pp_model model) {
  const double dv_dx = x / (2.0 * g.r_e * g.orbit_radius());
  if (model == pp_model::exact) {
    if (v >= 1.0) return 0.0;
    return s * std::exp((s - 1) * std::log1p(-v)) * dv_dx;
  }
  return s * std::exp(-static_cast<double>(s) * v) * dv_dx;
}

}  // namespace

distance_law nearest_dist(double x, int sat_count, const earth_geometry& g,
                          pp_model model) {
  check_count(sat_count);
  if (x <= g.a) return {0.0, 0.0};
  const double far = 2.0 * g.r_e + g.a;
  if (x >= far) return {1.0 - void_prob(1.0, sat_count, model), 0.0};
  const double v = cap_fraction(g, x);
  return {1.0 - void_prob(v, sat_count, model),
          nearest_pdf(v, x, sat_count, g, model)};
}

distance_law serving_ml_dist(double x, int sat_count, const earth_geometry& g,
                             const geometry_derived& der, pp_model model) {
  check_count(sat_count);
  const double mass = nearest_dist(der.d_th, sat_count, g, model).cdf;
  if (!(mass > 0.0))
    throw degenerate_conditioning(
        "main-lobe cap has zero probability (psi_th == 0)");
  if (x <= g.a) return {0.0, 0.0};
  if (x >= der.d_th) return {1.0, 0.0};
  const distance_law n = nearest_dist(x, sat_count, g, model);
  return {n.cdf / mass, n.pdf / mass};
}

distance_law serving_sl_dist(double x, int sat_count, const earth_geometry& g,
                             const geometry_derived& der, pp_model model) {
  check_count(sat_count);
  const double lo = nearest_dist(der.d_th, sat_count, g, model).cdf;
  const double hi = nearest_dist(der.d_max, sat_count, g, model).cdf;
  const double mass = hi - lo;
  if (!(mass > 0.0))
    throw degenerate_conditioning(
        "side-lobe annulus has zero probability (psi_th == psi_max)");
  if (x <= der.d_th) return {0.0, 0.0};
  if (x >= der.d_max) return {1.0, 0.0};
  const distance_law n = nearest_dist(x, sat_count, g, model);
  return {(n.cdf - lo) / mass, n.pdf / mass};
}

case_probabilities case_probs(int sat_count, const earth_geometry& g,
                              const geometry_derived& der, pp_model model) {
  check_count(sat_count);
  const double v_th = cap_fraction(g, der.d_th);
  const double v_max = cap_fraction(g, der.d_max);
  const double void_th = void_prob(v_th, sat_count, model);
  const double void_max = void_prob(v_max, sat_count, model);
  case_probabilities c;
  c.model = model;
  c.p_ml = 1.0 - void_th;
  c.p_sl = void_th - void_max;
  c.p_inv = void_max;
  return c;
}

}  // namespace leo
