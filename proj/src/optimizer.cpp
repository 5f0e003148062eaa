#include "leo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leo/errors.hpp"
#include "leo/geometry.hpp"

namespace leo {
namespace {

constexpr double half_pi = 1.5707963267948966;
constexpr double improve_tol = 1e-9;

void check_probability(double p, const char* name) {
  if (!(p > 0.0) || !(p < 1.0))
    throw domain_error(std::string(name) + " must lie strictly in (0, 1)");
}

void check_constraints(const opt_constraints& c) {
  check_probability(c.eta, "eta");
  check_probability(c.epsilon, "epsilon");
  if (!(c.delta_r > 0.0) || !(c.delta_theta > 0.0))
    throw domain_error("search steps must be positive");
  if (!(c.r_hat > 0.0)) throw domain_error("r_hat must be positive");
  if (c.max_iters < 1) throw domain_error("max_iters must be at least 1");
}

double p_vis_at(const link_scene& sc, double theta_min, pp_model model) {
  const geometry_derived der =
      derive_geometry(sc.earth, theta_min, sc.omega_th);
  return case_probs(sc.sat_count, sc.earth, der, model).p_vis();
}

// Conditional outage at the given mask. The Poisson-limit model with a
// quadratic path loss dispatches to the incomplete-gamma closed form, whose
// cost does not grow with the constellation size; the fixed-size model keeps
// the quadrature route.
double p_out_at(const link_scene& sc, double rate, double theta_min,
                pp_model model, const series_control& ctl) {
  link_scene masked = sc;
  masked.theta_min = theta_min;
  if (model == pp_model::exact) return outage_exact(masked, rate, ctl).p_out;
  if (masked.budget.alpha == 2.0)
    return outage_approx_alpha2(masked, rate, ctl).p_out;
  return outage_approx(masked, rate, ctl).p_out;
}

struct best_point {
  double x = 0.0;
  double value = -1.0;
};

// Coarse grid at the given step (endpoints always included) followed by a
// golden-section refinement of the bracket around the best cell. Assumes f
// is continuous; robust to plateaus because ties keep the smallest x.
template <typename F>
best_point argmax_on_interval(F&& f, double lo, double hi, double step) {
  best_point best;
  if (!(hi > lo)) return {lo, f(lo)};

  std::vector<double> xs;
  const long long cells = static_cast<long long>(std::floor((hi - lo) / step));
  xs.reserve(static_cast<std::size_t>(cells) + 2);
  for (long long k = 0; k <= cells; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    if (x < hi) xs.push_back(x);
  }
  xs.push_back(hi);
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f(xs[i]);
    if (v > best.value) {
      best = {xs[i], v};
      best_idx = i;
    }
  }

  double a = best_idx > 0 ? xs[best_idx - 1] : lo;
  double b = best_idx + 1 < xs.size() ? xs[best_idx + 1] : hi;
  const double tol = std::max(1e-6 * (hi - lo), 1e-12);
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm > best.value) best = {mid, fm};
  return best;
}

}  // namespace

double throughput(const link_scene& sc, double rate, double theta_min,
                  pp_model model, const series_control& ctl) {
  if (!(rate >= 0.0)) throw domain_error("rate must be nonnegative");
  if (rate == 0.0) return 0.0;
  const double p_vis = p_vis_at(sc, theta_min, model);
  if (p_vis <= 0.0) return 0.0;
  const double p_out = p_out_at(sc, rate, theta_min, model, ctl);
  return p_vis * (1.0 - p_out) * rate;
}

double theta_upper_bound(const link_scene& sc, double eta, pp_model model) {
  check_probability(eta, "eta");
  const double s = static_cast<double>(sc.sat_count);
  // Smallest cap fraction whose void probability already meets the target.
  const double kappa_req = model == pp_model::exact
                               ? -std::expm1(std::log1p(-eta) / s)
                               : -std::log1p(-eta) / s;
  const double horizon = max_slant_range(sc.earth, 0.0);
  const double kappa_horizon = cap_fraction(sc.earth, horizon);
  if (kappa_req > kappa_horizon)
    throw infeasible_visibility(
        "visibility target " + std::to_string(eta) + " needs cap fraction " +
        std::to_string(kappa_req) + " but the horizon cap holds only " +
        std::to_string(kappa_horizon));
  const double d_req = range_from_cap_fraction(sc.earth, kappa_req);
  return min_elevation_from_range(sc.earth, d_req);
}

double rmax_given_theta(const link_scene& sc, double theta_min,
                        double epsilon, pp_model model,
                        const series_control& ctl) {
  check_probability(epsilon, "epsilon");
  if (!(theta_min >= 0.0) || !(theta_min <= half_pi))
    throw domain_error("theta_min must lie in [0, pi/2]");
  auto p_out = [&](double r) { return p_out_at(sc, r, theta_min, model, ctl); };

  if (p_out(1e-9) > epsilon) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (p_out(hi) < epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1.0e7)
      throw domain_error("rate bracket expansion exceeded 1e7 bps/Hz");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (p_out(mid) <= epsilon ? lo : hi) = mid;
  }
  // lo is the certified-feasible end of the final bracket.
  return lo;
}

double theta0_given_r(const link_scene& sc, double rate, double epsilon,
                      double theta_hi, pp_model model,
                      const series_control& ctl) {
  check_probability(epsilon, "epsilon");
  if (!(rate >= 0.0)) throw domain_error("rate must be nonnegative");
  if (!(theta_hi >= 0.0) || !(theta_hi <= half_pi))
    throw domain_error("theta_hi must lie in [0, pi/2]");
  if (rate == 0.0) return 0.0;
  auto p_out = [&](double th) { return p_out_at(sc, rate, th, model, ctl); };

  if (p_out(0.0) <= epsilon) return 0.0;
  if (p_out(theta_hi) > epsilon)
    throw infeasible_rate("outage at rate " + std::to_string(rate) +
                          " exceeds the ceiling even at the largest "
                          "admissible elevation mask");
  double lo = 0.0;       // violates epsilon
  double hi = theta_hi;  // feasible
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (p_out(mid) > epsilon ? lo : hi) = mid;
  }
  return hi;
}

opt_result optimize_iterative(const link_scene& sc, const opt_constraints& c,
                              pp_model model, const series_control& ctl) {
  check_constraints(c);
  const double mu = theta_upper_bound(sc, c.eta, model);

  opt_result out;
  out.theta_star = mu;
  double theta = mu;
  double t_max = 0.0;

  for (int iter = 0; iter < c.max_iters; ++iter) {
    const double r_max = rmax_given_theta(sc, theta, c.epsilon, model, ctl);
    const best_point br = argmax_on_interval(
        [&](double r) { return throughput(sc, r, theta, model, ctl); }, 0.0,
        r_max, c.delta_r);
    const double r_new = br.x;

    const double theta_lo =
        theta0_given_r(sc, r_new, c.epsilon, mu, model, ctl);
    const best_point bt = argmax_on_interval(
        [&](double th) { return throughput(sc, r_new, th, model, ctl); },
        theta_lo, mu, c.delta_theta);
    const double theta_new = bt.x;
    const double t_hat = bt.value;

    if (t_hat <= t_max + improve_tol) return out;
    t_max = t_hat;
    out.r_star = r_new;
    out.theta_star = theta_new;
    out.throughput = t_hat;
    out.trace.push_back({r_new, theta_new, t_hat});
    out.iterations = static_cast<int>(out.trace.size());
    theta = theta_new;
  }
  throw iteration_cap_reached(
      "still improving after " + std::to_string(c.max_iters) +
      " alternations; best so far R = " + std::to_string(out.r_star) +
      ", theta = " + std::to_string(out.theta_star) +
      ", T = " + std::to_string(out.throughput));
}

opt_result optimize_exhaustive(const link_scene& sc, const opt_constraints& c,
                               pp_model model, const series_control& ctl) {
  check_constraints(c);
  const long long n_theta =
      static_cast<long long>(std::floor(half_pi / c.delta_theta));
  const long long n_r =
      static_cast<long long>(std::floor(c.r_hat / c.delta_r));

  struct cell {
    double t = -1.0;
    double theta = 0.0;
    double r = 0.0;
    bool feasible = false;
  };

  // Rows evaluate concurrently in fixed-size blocks; each row prunes with
  // the incumbent known before its block started, so the scan is
  // deterministic for any worker count, and the serial merge preserves the
  // smallest-theta-then-smallest-R tie-break.
  int block = 1;
#ifdef _OPENMP
#pragma omp parallel
  {
#pragma omp single
    block = std::max(1, omp_get_num_threads());
  }
#endif

  cell best;
  for (long long row0 = 0; row0 <= n_theta; row0 += block) {
    const long long row1 = std::min(n_theta, row0 + block - 1);
    std::vector<cell> rows(static_cast<std::size_t>(row1 - row0 + 1));
    const double t_floor = best.feasible ? best.t : -1.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long j = row0; j <= row1; ++j) {
      const double theta = static_cast<double>(j) * c.delta_theta;
      cell row_best;
      row_best.theta = theta;
      const double p_vis = p_vis_at(sc, theta, model);
      if (p_vis >= c.eta - 1e-9) {
        for (long long k = 1; k <= n_r; ++k) {
          const double r = static_cast<double>(k) * c.delta_r;
          // Even an outage-free cell cannot beat the incumbent below this
          // bound; equality still evaluates so ties stay visible.
          const double bound = std::max(t_floor, row_best.t);
          if (p_vis * r < bound) continue;
          const double p_out = p_out_at(sc, r, theta, model, ctl);
          if (p_out > c.epsilon + 1e-9) break;  // outage grows with the rate
          const double t = p_vis * (1.0 - p_out) * r;
          if (t > row_best.t) row_best = {t, theta, r, true};
        }
      }
      rows[static_cast<std::size_t>(j - row0)] = row_best;
    }
    for (const cell& rb : rows) {
      if (!rb.feasible) continue;
      if (!best.feasible || rb.t > best.t) best = rb;
    }
  }

  if (!best.feasible)
    throw no_feasible_point(
        "no grid cell satisfies both the visibility floor and the outage "
        "ceiling");
  opt_result out;
  out.r_star = best.r;
  out.theta_star = best.theta;
  out.throughput = best.t;
  out.iterations = 0;
  return out;
}

}  // namespace leo
