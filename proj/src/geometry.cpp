#include "leo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "leo/errors.hpp"

namespace leo {

namespace {

constexpr double pi = std::numbers::pi;

void check_shell(const earth_geometry& g) {
  if (!(g.r_e > 0.0) || !(g.a > 0.0))
    throw domain_error("earth_geometry requires r_e > 0 and a > 0");
}

// asin/acos argument guard: trig identities evaluated in doubles can drift a
// few ulp past +-1.
double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

double max_slant_range(const earth_geometry& g, double theta_min) {
  check_shell(g);
  if (!(theta_min >= 0.0) || !(theta_min <= pi / 2.0))
    throw domain_error("theta_min must lie in [0, pi/2]");
  const double s = g.r_e * std::sin(theta_min);
  return std::sqrt(s * s + g.a * g.a + 2.0 * g.r_e * g.a) - s;
}

double min_elevation_from_range(const earth_geometry& g, double d) {
  check_shell(g);
  const double d_horizon = std::sqrt(g.a * g.a + 2.0 * g.r_e * g.a);
  // Tolerate a few ulp of slop at both ends; reject anything real.
  const double slack = 1e-9 * d_horizon;
  if (!(d >= g.a - slack) || !(d <= d_horizon + slack))
    throw domain_error("slant range outside [a, sqrt(a^2 + 2 r_e a)]");
  d = std::clamp(d, g.a, d_horizon);
  const double r = g.orbit_radius();
  const double sin_theta = (r * r - d * d - g.r_e * g.r_e) / (2.0 * d * g.r_e);
  return std::asin(clamp_unit(sin_theta));
}

double max_polar_angle(const earth_geometry& g, double d) {
  check_shell(g);
  const double d_far = 2.0 * g.r_e + g.a;
  const double slack = 1e-9 * d_far;
  if (!(d >= g.a - slack) || !(d <= d_far + slack))
    throw domain_error("slant range outside [a, 2 r_e + a]");
  d = std::clamp(d, g.a, d_far);
  const double r = g.orbit_radius();
  const double cos_psi =
      (g.r_e * g.r_e + r * r - d * d) / (2.0 * g.r_e * r);
  return std::acos(clamp_unit(cos_psi));
}

double threshold_polar_angle(const earth_geometry& g, double omega_th) {
  check_shell(g);
  if (!(omega_th >= 0.0) || !(omega_th < pi / 2.0))
    throw domain_error("omega_th must lie in [0, pi/2)");
  const double ratio = g.orbit_radius() / g.r_e;
  const double s = ratio * std::sin(omega_th);
  if (s > 1.0)
    throw beam_misses_earth(
        "main-lobe edge ray misses the ground sphere (omega_th = " +
        std::to_string(omega_th) + " rad)");
  return std::asin(s) - omega_th;
}

double threshold_distance(const earth_geometry& g, double psi) {
  check_shell(g);
  if (!(psi >= 0.0) || !(psi <= pi))
    throw domain_error("psi must lie in [0, pi]");
  const double r = g.orbit_radius();
  return std::sqrt(g.r_e * g.r_e + r * r - 2.0 * g.r_e * r * std::cos(psi));
}

double cap_fraction(const earth_geometry& g, double x) {
  check_shell(g);
  const double d_far = 2.0 * g.r_e + g.a;
  const double slack = 1e-9 * d_far;
  if (!(x >= g.a - slack) || !(x <= d_far + slack))
    throw domain_error("distance outside [a, 2 r_e + a]");
  x = std::clamp(x, g.a, d_far);
  return (x * x - g.a * g.a) / (4.0 * g.r_e * g.orbit_radius());
}

double range_from_cap_fraction(const earth_geometry& g, double v) {
  check_shell(g);
  if (!(v >= 0.0) || !(v <= 1.0))
    throw domain_error("cap fraction must lie in [0, 1]");
  return std::sqrt(g.a * g.a + 4.0 * g.r_e * g.orbit_radius() * v);
}

surface_area_split surface_areas(const earth_geometry& g, double psi_th,
                                 double psi_max) {
  check_shell(g);
  if (!(psi_max >= 0.0) || !(psi_max <= pi))
    throw domain_error("psi_max must lie in [0, pi]");
  if (!(psi_th >= 0.0)) throw domain_error("psi_th must be >= 0");
  psi_th = std::min(psi_th, psi_max);
  const double r = g.orbit_radius();
  surface_area_split s;
  s.total = 4.0 * pi * r * r;
  s.vis = 2.0 * pi * r * r * (1.0 - std::cos(psi_max));
  s.ml = 2.0 * pi * r * r * (1.0 - std::cos(psi_th));
  s.sl = s.vis - s.ml;
  return s;
}

geometry_derived derive_geometry(const earth_geometry& g, double theta_min,
                                 double omega_th) {
  geometry_derived d;
  d.theta_min = theta_min;
  d.omega_th = omega_th;
  d.d_max = max_slant_range(g, theta_min);
  d.psi_max = max_polar_angle(g, d.d_max);
  double psi_raw;
  try {
    psi_raw = threshold_polar_angle(g, omega_th);
  } catch (const beam_misses_earth&) {
    psi_raw = d.psi_max;
  }
  if (psi_raw >= d.psi_max) {
    // Beam covers the whole visible cap; pin both edges to the same values so
    // the side-lobe annulus is exactly empty.
    d.psi_th = d.psi_max;
    d.d_th = d.d_max;
  } else {
    d.psi_th = psi_raw;
    d.d_th = std::min(threshold_distance(g, psi_raw), d.d_max);
  }
  const surface_area_split s = surface_areas(g, d.psi_th, d.psi_max);
  d.area_total = s.total;
  d.area_vis = s.vis;
  d.area_ml = s.ml;
  d.area_sl = s.sl;
  return d;
}

}  // namespace leo
