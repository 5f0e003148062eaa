#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "leo/geometry.hpp"
#include "leo/outage.hpp"

namespace leo {

// Whether estimators condition on at least one visible satellite (discarding
// empty realizations) or count every realization. Outage under the
// unconditional mode treats an invisible realization as a service failure.
enum class mc_conditioning { unconditional, visible_only };

struct trial_config {
  long long trials = 1000000;
  std::uint64_t seed = 1;
  int chunk_size = 65536;
  mc_conditioning conditioning = mc_conditioning::visible_only;
};

struct mc_estimate {
  double mean = 0.0;
  double std_err = 0.0;  // sqrt(p (1-p) / n) scaled to the estimate's units
  long long trials_used = 0;
  long long trials_discarded = 0;
};

enum class service_case { mainlobe, sidelobe, invisible };

// Chunk-loop execution: serial reference or the OpenMP team. Both produce
// bit-identical results for identical (seed, trials, chunk_size) because
// every chunk owns a counter-derived substream and the reduction is
// order-fixed.
enum class exec_policy { serial, parallel };

// SplitMix64-mixed substream key for chunk i of a run seeded with seed.
std::uint64_t mc_stream_key(std::uint64_t seed, std::uint64_t chunk_index);

// Generator for one chunk, seeded from the stream key.
std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk_index);

// One constellation: sat_count polar angles from the terminal's zenith, each
// with cos(psi) ~ Uniform[-1, 1] (azimuth carries no information here).
std::vector<double> sample_constellation(int sat_count, std::mt19937_64& rng);

// Serving-case classification: nearest satellite within psi_th serves on the
// main lobe; otherwise the nearest within psi_max serves on the side lobe;
// otherwise nobody is visible.
service_case classify_case(const std::vector<double>& polar_angles,
                           const geometry_derived& der);

// Outage frequency: per trial, nearest visible satellite serves, its case
// picks the threshold coefficient, and the fading draw decides the event
// h < w d^alpha.
mc_estimate estimate_outage(const link_scene& sc, double rate,
                            const trial_config& tc,
                            exec_policy policy = exec_policy::parallel);

// Throughput estimate over unconditional trials with per-trial contribution
// rate * 1{visible and not in outage}; theta_min overrides the scene's mask.
mc_estimate estimate_throughput(const link_scene& sc, double rate,
                                double theta_min, const trial_config& tc,
                                exec_policy policy = exec_policy::parallel);

// Empirical frequencies of the three service cases (always unconditional).
struct mc_case_probs {
  mc_estimate ml;
  mc_estimate sl;
  mc_estimate inv;
};
mc_case_probs estimate_case_probs(const earth_geometry& earth,
                                  double theta_min, double omega_th,
                                  int sat_count, const trial_config& tc,
                                  exec_policy policy = exec_policy::parallel);

}  // namespace leo
