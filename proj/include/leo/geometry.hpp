#pragma once

namespace leo {

// Shell model: ground terminals on a sphere of radius r_e, satellites on a
// concentric sphere at altitude a. All lengths in meters, angles in radians.
struct earth_geometry {
  double r_e = 6378.0e3;
  double a = 600.0e3;

  double orbit_radius() const { return r_e + a; }
};

// Quantities derived from (geometry, elevation mask, beam half-angle) that the
// rest of the library consumes. psi_th is clamped to psi_max so the main-lobe
// cap is always a sub-cap of the visibility cap.
struct geometry_derived {
  double theta_min = 0.0;  // elevation mask [rad]
  double omega_th = 0.0;   // main-lobe half beamwidth [rad]
  double d_max = 0.0;      // slant range to the visibility-cap edge [m]
  double psi_max = 0.0;    // Earth-centered polar angle of that edge [rad]
  double psi_th = 0.0;     // polar angle of the main-lobe cap edge [rad]
  double d_th = 0.0;       // slant range at psi_th [m]
  double area_total = 0.0; // orbit-sphere area [m^2]
  double area_vis = 0.0;   // visible-cap area [m^2]
  double area_ml = 0.0;    // main-lobe cap area [m^2]
  double area_sl = 0.0;    // side-lobe annulus area [m^2]
};

struct surface_area_split {
  double total = 0.0;
  double vis = 0.0;
  double ml = 0.0;
  double sl = 0.0;
};

// Longest slant range still visible above elevation theta_min in [0, pi/2].
double max_slant_range(const earth_geometry& g, double theta_min);

// Inverse of max_slant_range on [a, sqrt(a^2 + 2 r_e a)].
double min_elevation_from_range(const earth_geometry& g, double d);

// Earth-centered polar angle subtended by a satellite at slant range d.
double max_polar_angle(const earth_geometry& g, double d);

// Polar angle of the cone where a nadir-pointing beam of half-angle omega_th
// intersects the ground sphere. Throws beam_misses_earth when the cone's edge
// ray clears the Earth entirely.
double threshold_polar_angle(const earth_geometry& g, double omega_th);

// Slant range from a terminal to a satellite at polar angle psi.
double threshold_distance(const earth_geometry& g, double psi);

// Fraction of the orbit sphere closer to the terminal than x; equals the
// normalized spherical-cap area (x^2 - a^2) / (4 r_e (r_e + a)).
double cap_fraction(const earth_geometry& g, double x);

// Inverse of cap_fraction on [0, 1].
double range_from_cap_fraction(const earth_geometry& g, double v);

// Areas of the orbit sphere, the visibility cap, the main-lobe sub-cap and
// the side-lobe annulus. psi_th is clamped into [0, psi_max].
surface_area_split surface_areas(const earth_geometry& g, double psi_th,
                                 double psi_max);

// One-stop derivation used by the higher layers. A beam that misses the Earth
// is treated as covering the whole visible cap (psi_th := psi_max).
geometry_derived derive_geometry(const earth_geometry& g, double theta_min,
                                 double omega_th);

}  // namespace leo
