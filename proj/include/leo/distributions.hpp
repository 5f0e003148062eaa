#pragma once

#include "leo/geometry.hpp"

namespace leo {

// Satellite placement model: the fixed-size uniform shell ("exact") or its
// Poisson limit with the same mean count ("approx").
enum class pp_model { exact, approx };

struct distance_law {
  double cdf = 0.0;
  double pdf = 0.0;  // per meter
};

struct case_probabilities {
  pp_model model = pp_model::exact;
  double p_ml = 0.0;   // nearest satellite inside the main-lobe cap
  double p_sl = 0.0;   // nearest satellite in the side-lobe annulus
  double p_inv = 0.0;  // no visible satellite
  double p_vis() const { return p_ml + p_sl; }
};

// Law of the distance from the terminal to the nearest satellite on the
// whole shell, F(x) = 1 - (1 - kappa(x))^S or its limit 1 - e^{-S kappa(x)}.
// Support [a, 2 r_e + a]; x outside is mapped to the flat extension.
distance_law nearest_dist(double x, int sat_count, const earth_geometry& g,
                          pp_model model);

// Conditional law of the serving distance given main-lobe service (the
// nearest satellite lies within the main-lobe cap). Support [a, d_th].
// Throws degenerate_conditioning when the cap has zero probability.
distance_law serving_ml_dist(double x, int sat_count, const earth_geometry& g,
                             const geometry_derived& der, pp_model model);

// Conditional law given side-lobe service. Support [d_th, d_max].
distance_law serving_sl_dist(double x, int sat_count, const earth_geometry& g,
                             const geometry_derived& der, pp_model model);

// Probabilities of the three service cases; they sum to one exactly.
case_probabilities case_probs(int sat_count, const earth_geometry& g,
                              const geometry_derived& der, pp_model model);

}  // namespace leo
