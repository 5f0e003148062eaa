#include "leo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "leo/channel.hpp"
#include "leo/errors.hpp"

namespace leo {
namespace {

// Fading parameters must be rejected before the chunk loop starts: an
// exception thrown inside an OpenMP region would not propagate.
void check_fading(const shadowed_rician_params& p) {
  if (!(p.b > 0.0) || !(p.m > 0.0) || !(p.omega > 0.0))
    throw domain_error("shadowed-Rician parameters must be positive");
}

void check_trials(const trial_config& tc) {
  if (tc.trials < 1)
    throw domain_error("trial_config.trials must be at least 1, got " +
                       std::to_string(tc.trials));
  if (tc.chunk_size < 1)
    throw domain_error("trial_config.chunk_size must be at least 1, got " +
                       std::to_string(tc.chunk_size));
}

// Runs fn once per chunk (possibly across an OpenMP team) and hands back the
// per-chunk partials in chunk order, so the caller's reduction is independent
// of how many workers executed the loop.
template <typename Partial, typename ChunkFn>
std::vector<Partial> run_chunks(const trial_config& tc, exec_policy policy,
                                ChunkFn fn) {
  const long long n_chunks =
      (tc.trials + tc.chunk_size - 1) / static_cast<long long>(tc.chunk_size);
  std::vector<Partial> parts(static_cast<std::size_t>(n_chunks));
  const bool go_parallel = policy == exec_policy::parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (go_parallel)
#endif
  for (long long c = 0; c < n_chunks; ++c) {
    std::mt19937_64 rng = chunk_rng(tc.seed, static_cast<std::uint64_t>(c));
    const long long begin = c * tc.chunk_size;
    const long long count = std::min<long long>(tc.chunk_size,
                                                tc.trials - begin);
    fn(rng, count, parts[static_cast<std::size_t>(c)]);
  }
  (void)go_parallel;
  return parts;
}

double binomial_std_err(long long successes, long long n) {
  if (n <= 0) return 0.0;
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// Geometry constants the per-trial loop needs, reduced to cosine thresholds
// so no trigonometric call happens per satellite.
struct trial_geometry {
  double cos_psi_max = 0.0;
  double cos_psi_th = 0.0;
  double r_sq_sum = 0.0;    // r_e^2 + (r_e + a)^2
  double two_r_orb = 0.0;   // 2 r_e (r_e + a)
};

trial_geometry make_trial_geometry(const earth_geometry& earth,
                                   const geometry_derived& der) {
  trial_geometry tg;
  tg.cos_psi_max = std::cos(der.psi_max);
  tg.cos_psi_th = std::cos(der.psi_th);
  const double orbit = earth.orbit_radius();
  tg.r_sq_sum = earth.r_e * earth.r_e + orbit * orbit;
  tg.two_r_orb = 2.0 * earth.r_e * orbit;
  return tg;
}

// Nearest satellite of the constellation == largest cos(psi), because the
// squared slant range r_e^2 + (r_e+a)^2 - 2 r_e (r_e+a) cos(psi) is strictly
// decreasing in cos(psi).
double max_cos_psi(int sat_count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double best = -2.0;
  for (int s = 0; s < sat_count; ++s) best = std::max(best, uni(rng));
  return best;
}

double slant_range_sq(const trial_geometry& tg, double cos_psi) {
  return tg.r_sq_sum - tg.two_r_orb * cos_psi;
}

struct outage_partial {
  long long outages = 0;
  long long used = 0;
  long long discarded = 0;
};

}  // namespace

std::uint64_t mc_stream_key(std::uint64_t seed, std::uint64_t chunk_index) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (chunk_index + 1);
  for (int round = 0; round < 2; ++round) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x ^= x >> 31;
  }
  return x;
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk_index) {
  return std::mt19937_64(mc_stream_key(seed, chunk_index));
}

std::vector<double> sample_constellation(int sat_count, std::mt19937_64& rng) {
  if (sat_count < 1)
    throw domain_error("sample_constellation requires sat_count >= 1, got " +
                       std::to_string(sat_count));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> angles(static_cast<std::size_t>(sat_count));
  for (double& psi : angles) psi = std::acos(uni(rng));
  return angles;
}

service_case classify_case(const std::vector<double>& polar_angles,
                           const geometry_derived& der) {
  double nearest = std::numeric_limits<double>::infinity();
  for (double psi : polar_angles) nearest = std::min(nearest, psi);
  if (nearest <= der.psi_th) return service_case::mainlobe;
  if (nearest <= der.psi_max) return service_case::sidelobe;
  return service_case::invisible;
}

mc_estimate estimate_outage(const link_scene& sc, double rate,
                            const trial_config& tc, exec_policy policy) {
  check_trials(tc);
  if (!(rate >= 0.0)) throw domain_error("rate must be nonnegative");
  check_fading(sc.fading);
  const geometry_derived der =
      derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
  const trial_geometry tg = make_trial_geometry(sc.earth, der);
  const snr_coeffs w = snr_coefficients(sc.budget, rate);
  const double half_alpha = 0.5 * sc.budget.alpha;
  const bool alpha_is_two = sc.budget.alpha == 2.0;
  const bool conditioned = tc.conditioning == mc_conditioning::visible_only;
  const int sat_count = sc.sat_count;
  const shadowed_rician_params fading = sc.fading;

  auto parts = run_chunks<outage_partial>(
      tc, policy,
      [&](std::mt19937_64& rng, long long count, outage_partial& part) {
        for (long long t = 0; t < count; ++t) {
          const double best = max_cos_psi(sat_count, rng);
          if (best < tg.cos_psi_max) {
            if (conditioned) {
              ++part.discarded;
            } else {
              // No satellite in view: the requested rate cannot be served.
              ++part.used;
              ++part.outages;
            }
            continue;
          }
          ++part.used;
          const double coeff = best >= tg.cos_psi_th ? w.w1 : w.w2;
          const double d_sq = slant_range_sq(tg, best);
          const double path = alpha_is_two ? d_sq : std::pow(d_sq, half_alpha);
          const double h = sr_sample(fading, rng);
          if (h < coeff * path) ++part.outages;
        }
      });

  outage_partial total;
  for (const outage_partial& p : parts) {
    total.outages += p.outages;
    total.used += p.used;
    total.discarded += p.discarded;
  }
  mc_estimate est;
  est.trials_used = total.used;
  est.trials_discarded = total.discarded;
  if (total.used > 0)
    est.mean = static_cast<double>(total.outages) /
               static_cast<double>(total.used);
  est.std_err = binomial_std_err(total.outages, total.used);
  return est;
}

mc_estimate estimate_throughput(const link_scene& sc, double rate,
                                double theta_min, const trial_config& tc,
                                exec_policy policy) {
  check_trials(tc);
  if (!(rate >= 0.0)) throw domain_error("rate must be nonnegative");
  check_fading(sc.fading);
  link_scene masked = sc;
  masked.theta_min = theta_min;
  const geometry_derived der =
      derive_geometry(masked.earth, masked.theta_min, masked.omega_th);
  const trial_geometry tg = make_trial_geometry(masked.earth, der);
  const snr_coeffs w = snr_coefficients(masked.budget, rate);
  const double half_alpha = 0.5 * masked.budget.alpha;
  const bool alpha_is_two = masked.budget.alpha == 2.0;
  const int sat_count = masked.sat_count;
  const shadowed_rician_params fading = masked.fading;

  struct served_partial {
    long long served = 0;
  };
  auto parts = run_chunks<served_partial>(
      tc, policy,
      [&](std::mt19937_64& rng, long long count, served_partial& part) {
        for (long long t = 0; t < count; ++t) {
          const double best = max_cos_psi(sat_count, rng);
          if (best < tg.cos_psi_max) continue;
          const double coeff = best >= tg.cos_psi_th ? w.w1 : w.w2;
          const double d_sq = slant_range_sq(tg, best);
          const double path = alpha_is_two ? d_sq : std::pow(d_sq, half_alpha);
          const double h = sr_sample(fading, rng);
          if (h >= coeff * path) ++part.served;
        }
      });

  long long served = 0;
  for (const auto& p : parts) served += p.served;
  mc_estimate est;
  est.trials_used = tc.trials;
  est.trials_discarded = 0;
  est.mean = rate * static_cast<double>(served) /
             static_cast<double>(tc.trials);
  est.std_err = rate * binomial_std_err(served, tc.trials);
  return est;
}

mc_case_probs estimate_case_probs(const earth_geometry& earth,
                                  double theta_min, double omega_th,
                                  int sat_count, const trial_config& tc,
                                  exec_policy policy) {
  check_trials(tc);
  if (sat_count < 1)
    throw domain_error("estimate_case_probs requires sat_count >= 1, got " +
                       std::to_string(sat_count));
  const geometry_derived der = derive_geometry(earth, theta_min, omega_th);
  const trial_geometry tg = make_trial_geometry(earth, der);

  struct case_partial {
    long long ml = 0;
    long long sl = 0;
    long long inv = 0;
  };
  auto parts = run_chunks<case_partial>(
      tc, policy,
      [&](std::mt19937_64& rng, long long count, case_partial& part) {
        for (long long t = 0; t < count; ++t) {
          const double best = max_cos_psi(sat_count, rng);
          if (best >= tg.cos_psi_th)
            ++part.ml;
          else if (best >= tg.cos_psi_max)
            ++part.sl;
          else
            ++part.inv;
        }
      });

  case_partial total;
  for (const auto& p : parts) {
    total.ml += p.ml;
    total.sl += p.sl;
    total.inv += p.inv;
  }
  auto fill = [&](long long k) {
    mc_estimate est;
    est.trials_used = tc.trials;
    est.trials_discarded = 0;
    est.mean = static_cast<double>(k) / static_cast<double>(tc.trials);
    est.std_err = binomial_std_err(k, tc.trials);
    return est;
  };
  mc_case_probs out;
  out.ml = fill(total.ml);
  out.sl = fill(total.sl);
  out.inv = fill(total.inv);
  return out;
}

}  // namespace leo
