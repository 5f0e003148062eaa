// Benchmarks comparing the serial reference implementations against the
// OpenMP-parallel kernels, plus the per-route cost of the analytic outage
// evaluations that dominate sweeps and optimizer runs.

#include <benchmark/benchmark.h>

#include "leo/config.hpp"
#include "leo/montecarlo.hpp"
#include "leo/optimizer.hpp"
#include "leo/outage.hpp"

namespace {

leo::link_scene scene(const std::string& preset, const std::string& fading,
                      int sat_count) {
  leo::system_config cfg = leo::preset_config(preset);
  leo::apply_config_entry(cfg, "fading.preset", fading);
  cfg.sat_count = sat_count;
  return leo::to_scene(cfg);
}

void bm_mc_outage(benchmark::State& state, leo::exec_policy policy) {
  const leo::link_scene sc = scene("handheld-table1", "ils", 100);
  leo::trial_config tc;
  tc.trials = state.range(0);
  tc.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(leo::estimate_outage(sc, 1.0, tc, policy));
  }
  state.SetItemsProcessed(state.iterations() * tc.trials);
}

void bm_mc_outage_serial(benchmark::State& state) {
  bm_mc_outage(state, leo::exec_policy::serial);
}

void bm_mc_outage_parallel(benchmark::State& state) {
  bm_mc_outage(state, leo::exec_policy::parallel);
}

void bm_mc_throughput(benchmark::State& state, leo::exec_policy policy) {
  const leo::link_scene sc = scene("handheld-table1", "ils", 100);
  leo::trial_config tc;
  tc.trials = state.range(0);
  tc.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        leo::estimate_throughput(sc, 1.0, sc.theta_min, tc, policy));
  }
  state.SetItemsProcessed(state.iterations() * tc.trials);
}

void bm_mc_throughput_serial(benchmark::State& state) {
  bm_mc_throughput(state, leo::exec_policy::serial);
}

void bm_mc_throughput_parallel(benchmark::State& state) {
  bm_mc_throughput(state, leo::exec_policy::parallel);
}

void bm_outage_exact(benchmark::State& state) {
  const leo::link_scene sc =
      scene("handheld-table1", "ils", static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(leo::outage_exact(sc, 1.0));
  }
}

void bm_outage_approx_quadrature(benchmark::State& state) {
  const leo::link_scene sc =
      scene("handheld-table1", "ils", static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(leo::outage_approx(sc, 1.0));
  }
}

void bm_outage_approx_closed(benchmark::State& state) {
  const leo::link_scene sc =
      scene("handheld-table1", "ils", static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(leo::outage_approx_alpha2(sc, 1.0));
  }
}

void bm_optimize_exhaustive(benchmark::State& state) {
  const leo::link_scene sc = scene("vsat-table1", "as", 100);
  leo::opt_constraints c;
  c.delta_r = 0.01;
  c.delta_theta = 0.1 * 3.14159265358979324 / 180.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        leo::optimize_exhaustive(sc, c, leo::pp_model::approx));
  }
}

void bm_optimize_iterative(benchmark::State& state) {
  const leo::link_scene sc = scene("vsat-table1", "as", 100);
  leo::opt_constraints c;
  c.delta_r = 0.01;
  c.delta_theta = 0.1 * 3.14159265358979324 / 180.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        leo::optimize_iterative(sc, c, leo::pp_model::approx));
  }
}

BENCHMARK(bm_mc_outage_serial)->Arg(1 << 16)->Arg(1 << 20)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mc_outage_parallel)->Arg(1 << 16)->Arg(1 << 20)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mc_throughput_serial)->Arg(1 << 18)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mc_throughput_parallel)->Arg(1 << 18)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_outage_exact)->Arg(10)->Arg(100)->Arg(1000)
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_outage_approx_quadrature)->Arg(10)->Arg(100)->Arg(1000)
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_outage_approx_closed)->Arg(10)->Arg(100)->Arg(1000)
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_optimize_iterative)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_optimize_exhaustive)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
