#include "leo/outage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "leo/errors.hpp"
#include "leo/gamma.hpp"
#include "leo/quadrature.hpp"

namespace leo {

namespace {

constexpr double quad_tol = 3e-14;      // per-term absolute tolerance
constexpr double quad_err_cap = 3e-11;  // accumulated error ceiling
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Neumaier compensated accumulator.
struct kahan_sum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// Incremental P(k, z) walked down in k: p holds P(k, z) and t the Poisson
// mass z^k e^{-z} / k! subtracted on each step. Used for the rigorous series
// tail bound, since every later term is below the current P(k, z).
struct gamma_p_ladder {
  double z = 0.0;
  double p = 0.0;
  double t = 0.0;
  int k = 1;
  explicit gamma_p_ladder(double z_in) : z(z_in) {
    if (z > 0.0) {
      p = -std::expm1(-z);
      t = std::exp(std::log(z) - z);
    }
  }
  void advance() {
    p = std::max(0.0, p - t);
    ++k;
    t *= z / static_cast<double>(k);
  }
};

// Scenario-derived numbers shared by every evaluation route.
struct eval_context {
  geometry_derived der;
  case_probabilities cp;
  snr_coeffs w;
  double fourth = 0.0;  // 4 r_e (r_e + a)
  double two_b = 0.0;
  double v_th = 0.0;
  double v_max = 0.0;
};

// One serving case (main lobe or side lobe) as an integration problem: the
// distance interval, its cap-fraction image, the fading threshold
// coefficient and the case probability used as the conditioning mass.
struct case_spec {
  bool active = false;
  double weight = 0.0;
  double w = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  double z_lo = 0.0;
  double z_hi = 0.0;
};

void check_rate(double rate) {
  if (!(rate >= 0.0)) throw domain_error("rate must be >= 0");
}

eval_context make_context(const link_scene& sc, double rate, pp_model model) {
  check_rate(rate);
  eval_context ctx;
  ctx.der = derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
  ctx.cp = case_probs(sc.sat_count, sc.earth, ctx.der, model);
  ctx.w = snr_coefficients(sc.budget, rate);
  ctx.fourth = 4.0 * sc.earth.r_e * sc.earth.orbit_radius();
  ctx.two_b = 2.0 * sc.fading.b;
  ctx.v_th = cap_fraction(sc.earth, ctx.der.d_th);
  ctx.v_max = cap_fraction(sc.earth, ctx.der.d_max);
  return ctx;
}

case_spec make_case(const link_scene& sc, const eval_context& ctx,
                    link_case which) {
  case_spec cs;
  if (which == link_case::mainlobe) {
    cs.weight = ctx.cp.p_ml;
    cs.w = ctx.w.w1;
    cs.x_lo = sc.earth.a;
    cs.x_hi = ctx.der.d_th;
    cs.v_lo = 0.0;
    cs.v_hi = ctx.v_th;
  } else {
    cs.weight = ctx.cp.p_sl;
    cs.w = ctx.w.w2;
    cs.x_lo = ctx.der.d_th;
    cs.x_hi = ctx.der.d_max;
    cs.v_lo = ctx.v_th;
    cs.v_hi = ctx.v_max;
  }
  cs.z_lo = cs.w * std::pow(cs.x_lo, sc.budget.alpha) / ctx.two_b;
  cs.z_hi = cs.w * std::pow(cs.x_hi, sc.budget.alpha) / ctx.two_b;
  cs.active = cs.weight > 1e-300 && cs.v_hi > cs.v_lo;
  return cs;
}

outage_result zero_result(outage_method method) {
  outage_result out;
  out.method = method;
  return out;
}

// Adaptive integration of f over [lo, hi] with a geometric pre-split towards
// lo. The serving-distance weight decays like e^{-S v}, so for large
// constellations nearly all mass sits in a boundary layer of width ~1/S; a
// single panel spanning the whole interval can sample right past that layer
// and accept a spuriously small estimate.
double integrate_layered(const std::function<double(double)>& f, double lo,
                         double hi, double decay_scale, double tol,
                         double& err_out) {
  const double width = hi - lo;
  int levels = 0;
  while (decay_scale * width * std::ldexp(1.0, -levels) > 8.0 && levels < 48)
    ++levels;
  const double seg_tol = tol / static_cast<double>(levels + 1);
  kahan_sum total;
  double err = 0.0;
  double prev = lo;
  for (int j = levels; j >= 1; --j) {
    const double mid = lo + width * std::ldexp(1.0, -j);
    const quad_result r = integrate(f, prev, mid, seg_tol);
    total.add(r.value);
    err += r.error;
    prev = mid;
  }
  const quad_result r = integrate(f, prev, hi, seg_tol);
  total.add(r.value);
  err += r.error;
  err_out = err;
  return total.value();
}

// Series term n for one case as the conditional expectation
// E[P(1+n, w X^alpha / 2b) | case], integrated in the cap-fraction variable
// v where the squared distance is affine (x^2 = a^2 + 4 r_e (r_e+a) v) and
// the nearest-distance density is S (1-v)^{S-1} or its Poisson limit.
class v_space_term {
 public:
  v_space_term(const link_scene& sc, const eval_context& ctx,
               const case_spec& cs, pp_model model)
      : cs_(cs),
        model_(model),
        s_(static_cast<double>(sc.sat_count)),
        a_sq_(sc.earth.a * sc.earth.a),
        fourth_(ctx.fourth),
        two_b_(ctx.two_b),
        half_alpha_(0.5 * sc.budget.alpha) {}

  double operator()(int n, double& err) const {
    const double order = 1.0 + static_cast<double>(n);
    auto f = [&](double v) { return gamma_p(order, z_of(v)) * density(v); };
    const double g =
        integrate_layered(f, cs_.v_lo, cs_.v_hi, s_, quad_tol, err);
    return std::clamp(g, 0.0, 1.0);
  }

 private:
  double z_of(double v) const {
    const double x_sq = a_sq_ + fourth_ * v;
    if (half_alpha_ == 1.0) return cs_.w * x_sq / two_b_;
    return cs_.w * std::pow(x_sq, half_alpha_) / two_b_;
  }
  double density(double v) const {
    if (model_ == pp_model::exact)
      return s_ * std::exp((s_ - 1.0) * std::log1p(-v)) / cs_.weight;
    return s_ * std::exp(-s_ * v) / cs_.weight;
  }

  case_spec cs_;
  pp_model model_;
  double s_;
  double a_sq_;
  double fourth_;
  double two_b_;
  double half_alpha_;
};

// Series term n for one case through the alpha = 2 closed form: the case
// integral collapses to a difference of regularized gammas at arguments
// scaled by w_shift = 1 + 2 S b / (w 4 r_e (r_e+a)), and the boundary terms
// carry the void probabilities at the interval ends. Evaluated so that every
// factor stays in [0, 1] or in the log domain.
class alpha2_term {
 public:
  alpha2_term(const link_scene& sc, const eval_context& ctx,
              const case_spec& cs)
      : cs_(cs) {
    const double s = static_cast<double>(sc.sat_count);
    w_shift_ = 1.0 + 2.0 * s * sc.fading.b / (cs.w * ctx.fourth);
    ln_w_shift_ = std::log(w_shift_);
    ea_exp_ = s * sc.earth.a * sc.earth.a / ctx.fourth;
    void_lo_ = std::exp(-s * cs.v_lo);
    void_hi_ = std::exp(-s * cs.v_hi);
  }

  double operator()(int n) const {
    const double order = 1.0 + static_cast<double>(n);
    const double p_lo = gamma_p(order, cs_.z_lo);
    const double p_hi = gamma_p(order, cs_.z_hi);
    const double diff =
        gamma_p_diff(order, w_shift_ * cs_.z_lo, w_shift_ * cs_.z_hi);
    double integral = 0.0;
    if (diff > 0.0)
      integral = std::exp(ea_exp_ - order * ln_w_shift_ + std::log(diff));
    const double bracket = void_lo_ * p_lo - void_hi_ * p_hi + integral;
    return std::clamp(bracket / cs_.weight, 0.0, 1.0);
  }

 private:
  case_spec cs_;
  double w_shift_ = 1.0;
  double ln_w_shift_ = 0.0;
  double ea_exp_ = 0.0;
  double void_lo_ = 1.0;
  double void_hi_ = 0.0;
};

// Shared series driver. term_g(n, case_idx, err) returns the normalized case
// term in [0, 1] (0 = main lobe, 1 = side lobe); the loop weights it by the
// fading mass A_n, accumulates both cases with compensated sums, and stops
// once the added increment and the rigorous tail bound
// tail_A(n) * P(n+2, z_hi) both drop below ctl.tol.
template <typename TermFn>
outage_result run_series(const link_scene& sc, const eval_context& ctx,
                         const case_spec& ml, const case_spec& sl,
                         const series_control& ctl, outage_method method,
                         TermFn&& term_g) {
  const double p_vis = ctx.cp.p_vis();
  if (!(p_vis > 0.0))
    throw degenerate_conditioning("no visible-service case has positive probability");
  outage_result out;
  out.method = method;
  sr_weight_series wts(sc.fading);
  gamma_p_ladder lad_ml(ml.active ? ml.z_hi : 0.0);
  gamma_p_ladder lad_sl(sl.active ? sl.z_hi : 0.0);
  kahan_sum acc_ml;
  kahan_sum acc_sl;
  double err_total = 0.0;
  for (int n = 0;; ++n, wts.advance()) {
    if (n >= ctl.n_max)
      throw convergence_not_reached("fading series did not settle within " +
                                    std::to_string(ctl.n_max) + " terms");
    const double a_n = wts.weight();
    double g_ml = 0.0;
    double g_sl = 0.0;
    if (ml.active && a_n > 0.0) {
      double e = 0.0;
      g_ml = term_g(n, 0, e);
      err_total += a_n * e;
    }
    if (sl.active && a_n > 0.0) {
      double e = 0.0;
      g_sl = term_g(n, 1, e);
      err_total += a_n * e;
    }
    acc_ml.add(a_n * g_ml);
    acc_sl.add(a_n * g_sl);
    out.n_used = n;
    const double delta =
        (ml.weight * a_n * g_ml + sl.weight * a_n * g_sl) / p_vis;
    lad_ml.advance();
    lad_sl.advance();
    const double tail =
        wts.tail() * (ml.weight * lad_ml.p + sl.weight * lad_sl.p) / p_vis;
    if (delta < ctl.tol && tail < ctl.tol) break;
  }
  if (err_total > quad_err_cap)
    throw quadrature_failure("accumulated quadrature error " +
                             std::to_string(err_total) +
                             " exceeds the certified budget");
  out.p_out_ml = ml.active ? std::clamp(acc_ml.value(), 0.0, 1.0) : 0.0;
  out.p_out_sl = sl.active ? std::clamp(acc_sl.value(), 0.0, 1.0) : 0.0;
  out.p_out = std::clamp(
      (ml.weight * out.p_out_ml + sl.weight * out.p_out_sl) / p_vis, 0.0, 1.0);
  return out;
}

outage_result quadrature_route(const link_scene& sc, double rate,
                               const series_control& ctl, pp_model model,
                               outage_method method) {
  const eval_context ctx = make_context(sc, rate, model);
  if (rate == 0.0) return zero_result(method);
  const case_spec ml = make_case(sc, ctx, link_case::mainlobe);
  const case_spec sl = make_case(sc, ctx, link_case::sidelobe);
  const v_space_term term_ml(sc, ctx, ml, model);
  const v_space_term term_sl(sc, ctx, sl, model);
  return run_series(sc, ctx, ml, sl, ctl, method,
                    [&](int n, int case_idx, double& err) {
                      return case_idx == 0 ? term_ml(n, err)
                                           : term_sl(n, err);
                    });
}

}  // namespace

outage_result outage_exact(const link_scene& sc, double rate,
                           const series_control& ctl) {
  return quadrature_route(sc, rate, ctl, pp_model::exact,
                          outage_method::exact_quadrature);
}

outage_result outage_approx(const link_scene& sc, double rate,
                            const series_control& ctl) {
  return quadrature_route(sc, rate, ctl, pp_model::approx,
                          outage_method::approx);
}

outage_result outage_approx_alpha2(const link_scene& sc, double rate,
                                   const series_control& ctl) {
  if (sc.budget.alpha != 2.0)
    throw domain_error("the closed form requires alpha == 2 exactly");
  const eval_context ctx = make_context(sc, rate, pp_model::approx);
  if (rate == 0.0) return zero_result(outage_method::approx_alpha2);
  const case_spec ml = make_case(sc, ctx, link_case::mainlobe);
  const case_spec sl = make_case(sc, ctx, link_case::sidelobe);
  const alpha2_term term_ml(sc, ctx, ml);
  const alpha2_term term_sl(sc, ctx, sl);
  return run_series(sc, ctx, ml, sl, ctl, outage_method::approx_alpha2,
                    [&](int n, int case_idx, double&) {
                      return case_idx == 0 ? term_ml(n) : term_sl(n);
                    });
}

outage_result outage_exact_closed_form(const link_scene& sc, double rate,
                                       const series_control& ctl, int s_cap,
                                       double max_decades) {
  const eval_context ctx = make_context(sc, rate, pp_model::exact);
  if (rate == 0.0) return zero_result(outage_method::exact_closed);
  if (sc.sat_count > s_cap)
    throw cancellation_overflow(
        "binomial closed form disabled for S = " +
        std::to_string(sc.sat_count) + " > cap " + std::to_string(s_cap) +
        ": native-scale factors exceed the 64-bit range budget; use the "
        "quadrature path");
  const double p_vis = ctx.cp.p_vis();
  if (!(p_vis > 0.0))
    throw degenerate_conditioning("no visible-service case has positive probability");

  const int s = sc.sat_count;
  const double sd = static_cast<double>(s);
  const double alpha = sc.budget.alpha;
  const double far = 2.0 * sc.earth.r_e + sc.earth.a;
  const double ln_far = std::log(far);
  // ln C(S-1, k), the outer binomial prefactor per k, fixed across terms.
  std::vector<double> base_k(static_cast<size_t>(s));
  for (int k = 0; k < s; ++k) {
    const double kd = static_cast<double>(k);
    base_k[static_cast<size_t>(k)] =
        std::lgamma(sd) - std::lgamma(kd + 1.0) - std::lgamma(sd - kd) +
        2.0 * (sd - 1.0 - kd) * ln_far - std::log(2.0 * kd + 2.0);
  }
  const double ln_pref = std::log(2.0 * sd) - sd * std::log(ctx.fourth);

  const case_spec cases[2] = {make_case(sc, ctx, link_case::mainlobe),
                              make_case(sc, ctx, link_case::sidelobe)};
  kahan_sum acc[2];
  double max_piece_lg[2] = {neg_inf, neg_inf};
  gamma_p_ladder ladders[2] = {
      gamma_p_ladder(cases[0].active ? cases[0].z_hi : 0.0),
      gamma_p_ladder(cases[1].active ? cases[1].z_hi : 0.0)};

  outage_result out;
  out.method = outage_method::exact_closed;
  sr_weight_series wts(sc.fading);
  for (int n = 0;; ++n, wts.advance()) {
    if (n >= ctl.n_max)
      throw convergence_not_reached("fading series did not settle within " +
                                    std::to_string(ctl.n_max) + " terms");
    const double a_n = wts.weight();
    const double order = 1.0 + static_cast<double>(n);
    double t_case[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      const case_spec& cs = cases[c];
      if (!cs.active || a_n <= 0.0) continue;
      const double ln_common = ln_pref - std::log(cs.weight) +
                               std::log(a_n) - std::lgamma(order);
      const double p_lo = gamma_p(order, cs.z_lo);
      const double p_hi = gamma_p(order, cs.z_hi);
      const double lg_p_lo = p_lo > 0.0 ? std::log(p_lo) : neg_inf;
      const double lg_p_hi = p_hi > 0.0 ? std::log(p_hi) : neg_inf;
      const double ln_x_lo = std::log(cs.x_lo);
      const double ln_x_hi = std::log(cs.x_hi);
      const double ln_scale = std::log(ctx.two_b) - std::log(cs.w);
      // Three antiderivative pieces per k, each as (log magnitude, sign).
      std::vector<double> lg;
      std::vector<double> sg;
      lg.reserve(static_cast<size_t>(3 * s));
      sg.reserve(static_cast<size_t>(3 * s));
      double lmax = neg_inf;
      for (int k = 0; k < s; ++k) {
        const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
        const double mu = 2.0 * static_cast<double>(k) + 2.0;
        const double b = ln_common + base_k[static_cast<size_t>(k)];
        const double order3 = order + mu / alpha;
        const double diff3 = gamma_p_diff(order3, cs.z_lo, cs.z_hi);
        const double pieces[3] = {
            b + mu * ln_x_hi + std::lgamma(order) + lg_p_hi,
            b + mu * ln_x_lo + std::lgamma(order) + lg_p_lo,
            b + (mu / alpha) * ln_scale + std::lgamma(order3) +
                (diff3 > 0.0 ? std::log(diff3) : neg_inf)};
        const double signs[3] = {sign_k, -sign_k, -sign_k};
        for (int j = 0; j < 3; ++j) {
          if (pieces[j] == neg_inf) continue;
          lg.push_back(pieces[j]);
          sg.push_back(signs[j]);
          lmax = std::max(lmax, pieces[j]);
        }
      }
      if (lmax == neg_inf) continue;
      kahan_sum shifted;
      for (size_t i = 0; i < lg.size(); ++i)
        shifted.add(sg[i] * std::exp(lg[i] - lmax));
      t_case[c] = std::exp(lmax) * shifted.value();
      max_piece_lg[c] = std::max(max_piece_lg[c], lmax);
    }
    acc[0].add(t_case[0]);
    acc[1].add(t_case[1]);
    out.n_used = n;
    const double delta = (cases[0].weight * std::fabs(t_case[0]) +
                          cases[1].weight * std::fabs(t_case[1])) /
                         p_vis;
    ladders[0].advance();
    ladders[1].advance();
    const double tail = wts.tail() *
                        (cases[0].weight * ladders[0].p +
                         cases[1].weight * ladders[1].p) /
                        p_vis;
    if (delta < ctl.tol && tail < ctl.tol) break;
  }

  double p_case[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    if (!cases[c].active) continue;
    const double sum = acc[c].value();
    if (max_piece_lg[c] == neg_inf) continue;  // every piece underflowed to 0
    if (!(sum > 0.0))
      throw cancellation_overflow(
          "binomial closed form lost all significant digits (alternating sum "
          "collapsed to " +
          std::to_string(sum) + ")");
    const double decades = (max_piece_lg[c] - std::log(sum)) / std::log(10.0);
    if (decades > max_decades)
      throw cancellation_overflow(
          "binomial closed form cancellation spans " +
          std::to_string(decades) + " decades (budget " +
          std::to_string(max_decades) + ")");
    p_case[c] = std::clamp(sum, 0.0, 1.0);
  }
  out.p_out_ml = p_case[0];
  out.p_out_sl = p_case[1];
  out.p_out = std::clamp((cases[0].weight * p_case[0] +
                          cases[1].weight * p_case[1]) /
                             p_vis,
                         0.0, 1.0);
  return out;
}

double outage_asymptotic(const link_scene& sc, double rate,
                         const series_control& ctl) {
  check_rate(rate);
  const snr_coeffs w = snr_coefficients(sc.budget, rate);
  if (rate == 0.0) return 0.0;
  return sr_cdf(w.w1 * std::pow(sc.earth.a, sc.budget.alpha), sc.fading, ctl);
}

series_delta series_increment(int n, const link_scene& sc, double rate) {
  if (n < 0) throw domain_error("series index must be >= 0");
  const eval_context ctx = make_context(sc, rate, pp_model::approx);
  series_delta d;
  if (rate == 0.0) return d;
  const double p_vis = ctx.cp.p_vis();
  if (!(p_vis > 0.0))
    throw degenerate_conditioning("no visible-service case has positive probability");
  sr_weight_series wts(sc.fading);
  for (int i = 0; i < n; ++i) wts.advance();
  const double a_n = wts.weight();
  const case_spec ml = make_case(sc, ctx, link_case::mainlobe);
  const case_spec sl = make_case(sc, ctx, link_case::sidelobe);
  double err = 0.0;
  if (ml.active && a_n > 0.0)
    d.ml = a_n * v_space_term(sc, ctx, ml, pp_model::approx)(n, err);
  if (sl.active && a_n > 0.0)
    d.sl = a_n * v_space_term(sc, ctx, sl, pp_model::approx)(n, err);
  d.combined = (ml.weight * d.ml + sl.weight * d.sl) / p_vis;
  return d;
}

outage_result outage_approx_truncated(const link_scene& sc, double rate,
                                      int last_n) {
  const eval_context ctx = make_context(sc, rate, pp_model::approx);
  outage_result out;
  out.method = outage_method::approx;
  out.n_used = last_n;
  if (rate == 0.0 || last_n < 0) return out;
  const double p_vis = ctx.cp.p_vis();
  if (!(p_vis > 0.0))
    throw degenerate_conditioning("no visible-service case has positive probability");
  const case_spec ml = make_case(sc, ctx, link_case::mainlobe);
  const case_spec sl = make_case(sc, ctx, link_case::sidelobe);
  const v_space_term term_ml(sc, ctx, ml, pp_model::approx);
  const v_space_term term_sl(sc, ctx, sl, pp_model::approx);
  sr_weight_series wts(sc.fading);
  kahan_sum acc_ml;
  kahan_sum acc_sl;
  double err_total = 0.0;
  for (int n = 0; n <= last_n; ++n, wts.advance()) {
    const double a_n = wts.weight();
    if (a_n > 0.0) {
      double e = 0.0;
      if (ml.active) {
        acc_ml.add(a_n * term_ml(n, e));
        err_total += a_n * e;
      }
      if (sl.active) {
        acc_sl.add(a_n * term_sl(n, e));
        err_total += a_n * e;
      }
    }
  }
  if (err_total > quad_err_cap)
    throw quadrature_failure("accumulated quadrature error " +
                             std::to_string(err_total) +
                             " exceeds the certified budget");
  out.p_out_ml = ml.active ? std::clamp(acc_ml.value(), 0.0, 1.0) : 0.0;
  out.p_out_sl = sl.active ? std::clamp(acc_sl.value(), 0.0, 1.0) : 0.0;
  out.p_out = std::clamp(
      (ml.weight * out.p_out_ml + sl.weight * out.p_out_sl) / p_vis, 0.0, 1.0);
  return out;
}

double approx_case_integral(const link_scene& sc, double rate, int n,
                            link_case which) {
  if (n < 0) throw domain_error("series index must be >= 0");
  const eval_context ctx = make_context(sc, rate, pp_model::approx);
  if (rate == 0.0) return 0.0;
  const case_spec cs = make_case(sc, ctx, which);
  if (!cs.active) return 0.0;
  const double s = static_cast<double>(sc.sat_count);
  const double order = 1.0 + static_cast<double>(n);
  const double lg_norm = std::lgamma(order);
  const double inv_alpha = 2.0 / sc.budget.alpha;
  const double a_sq = sc.earth.a * sc.earth.a;
  // Integrand of the case integral in the gamma argument t, with the
  // normalizing 1/Gamma(1+n) and the overflow-prone e^{S a^2 / (4 r_e
  // (r_e+a))} prefactor folded in: exp(n ln t - t - lnGamma(1+n) - S v(t))
  // where v(t) is the cap fraction at the distance mapped from t.
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double x_sq = std::pow(ctx.two_b * t / cs.w, inv_alpha);
    const double v = (x_sq - a_sq) / ctx.fourth;
    return std::exp(static_cast<double>(n) * std::log(t) - t - lg_norm -
                    s * std::max(v, 0.0));
  };
  // Pre-split so neither sharp feature is stepped over: the Poisson bump at
  // t ~ n (width ~sqrt(n)) and the e^{-S v(t)} boundary layer at t_lo.
  std::vector<double> cuts = {cs.z_lo, cs.z_hi};
  const double sigma = std::sqrt(order);
  for (const double c : {order - 8.0 * sigma, order - 2.0 * sigma,
                         order + 2.0 * sigma, order + 8.0 * sigma})
    if (c > cs.z_lo && c < cs.z_hi) cuts.push_back(c);
  const double width = cs.z_hi - cs.z_lo;
  const double x_sq_lo = std::pow(ctx.two_b * cs.z_lo / cs.w, inv_alpha);
  const double dv_dt =
      inv_alpha * x_sq_lo / (std::max(cs.z_lo, 1e-300) * ctx.fourth);
  const double layer = 4.0 / std::max(s * dv_dt, 1e-300);
  for (int j = 1; j <= 48; ++j) {
    // Stop refining once segments are comfortably inside the decay scale of
    // the exponential weight at the lower endpoint.
    if (width * std::ldexp(1.0, -j) < layer) break;
    const double c = cs.z_lo + width * std::ldexp(1.0, -j);
    if (c > cs.z_lo && c < cs.z_hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  kahan_sum total;
  const double seg_tol = quad_tol / static_cast<double>(cuts.size());
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total.add(integrate(f, cuts[i], cuts[i + 1], seg_tol).value);
  return total.value();
}

double approx_case_integral_alpha2(const link_scene& sc, double rate, int n,
                                   link_case which) {
  if (n < 0) throw domain_error("series index must be >= 0");
  if (sc.budget.alpha != 2.0)
    throw domain_error("the closed form requires alpha == 2 exactly");
  const eval_context ctx = make_context(sc, rate, pp_model::approx);
  if (rate == 0.0) return 0.0;
  const case_spec cs = make_case(sc, ctx, which);
  if (!cs.active) return 0.0;
  const double s = static_cast<double>(sc.sat_count);
  const double order = 1.0 + static_cast<double>(n);
  const double w_shift = 1.0 + 2.0 * s * sc.fading.b / (cs.w * ctx.fourth);
  const double diff =
      gamma_p_diff(order, w_shift * cs.z_lo, w_shift * cs.z_hi);
  if (!(diff > 0.0)) return 0.0;
  const double ea_exp = s * sc.earth.a * sc.earth.a / ctx.fourth;
  return std::exp(ea_exp - order * std::log(w_shift) + std::log(diff));
}

}  // namespace leo
