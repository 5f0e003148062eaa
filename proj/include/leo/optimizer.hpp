#pragma once

#include <vector>

#include "leo/channel.hpp"
#include "leo/distributions.hpp"
#include "leo/outage.hpp"

namespace leo {

// Constraint set and search resolution for the throughput maximization
// max_{R, theta_min} P_vis(theta_min) (1 - P_out(R, theta_min)) R subject to
// P_vis >= eta and P_out <= epsilon.
struct opt_constraints {
  double eta = 0.9;        // visibility floor
  double epsilon = 0.1;    // outage ceiling
  double delta_r = 0.01;   // rate grid step [bps/Hz]
  double delta_theta = 0.0017453292519943296;  // angle grid step [rad] (0.1 deg)
  double r_hat = 10.0;     // rate upper bound for the exhaustive grid
  int max_iters = 50;      // alternation cap for the iterative solver
};

struct opt_trace_point {
  double rate = 0.0;
  double theta_min = 0.0;
  double throughput = 0.0;
};

// trace lists the strictly improving iterates of the alternating solver in
// order (so it is nondecreasing in throughput); iterations == trace.size().
// The exhaustive search reports iterations == 0 and an empty trace.
struct opt_result {
  double r_star = 0.0;
  double theta_star = 0.0;
  double throughput = 0.0;
  int iterations = 0;
  std::vector<opt_trace_point> trace;
};

// System throughput T = P_vis(theta_min) (1 - P_out(R, theta_min)) R with
// both factors evaluated under the same placement model. theta_min overrides
// the scene's own mask.
double throughput(const link_scene& sc, double rate, double theta_min,
                  pp_model model, const series_control& ctl = {});

// Largest elevation mask mu with P_vis(mu) >= eta, from inverting the void
// probability through the cap fraction and the slant-range/elevation map.
// Throws infeasible_visibility when even theta_min = 0 cannot reach eta.
double theta_upper_bound(const link_scene& sc, double eta, pp_model model);

// Largest rate with P_out(R, theta_min) <= epsilon, by bracketing plus
// bisection on the rate-monotone outage. Returns the feasible bracket end;
// the defining residual |P_out - epsilon| is within 1e-6. Returns 0 when
// even a vanishing rate violates epsilon.
double rmax_given_theta(const link_scene& sc, double theta_min,
                        double epsilon, pp_model model,
                        const series_control& ctl = {});

// Smallest elevation mask theta_0 <= theta_hi with
// P_out(rate, theta_0) <= epsilon (outage decreases with the mask). Returns
// 0 when theta_min = 0 is already feasible; throws infeasible_rate when even
// theta_hi violates epsilon.
double theta0_given_r(const link_scene& sc, double rate, double epsilon,
                      double theta_hi, pp_model model,
                      const series_control& ctl = {});

// Alternating maximization: from theta = mu, repeat (maximize over R in
// [0, R_max(theta)], then over theta in [theta_0(R), mu]) while the
// throughput strictly improves by more than 1e-9. Inner 1-D searches are a
// coarse grid at the configured step refined by golden section. Throws
// iteration_cap_reached when max_iters alternations still improve.
opt_result optimize_iterative(const link_scene& sc, const opt_constraints& c,
                              pp_model model, const series_control& ctl = {});

// Grid argmax over theta in {j delta_theta <= pi/2} and R in
// {k delta_r <= r_hat, k >= 1}, keeping only cells satisfying both
// constraints; ties break toward smaller theta, then smaller R. Rows prune
// early: R cells stop once outage exceeds epsilon, and cells whose upper
// bound P_vis * R cannot beat the incumbent are skipped. Throws
// no_feasible_point when no cell qualifies.
opt_result optimize_exhaustive(const link_scene& sc, const opt_constraints& c,
                               pp_model model, const series_control& ctl = {});

}  // namespace leo
