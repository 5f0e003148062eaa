#include "leo/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leo/channel.hpp"
#include "leo/config.hpp"
#include "leo/distributions.hpp"
#include "leo/errors.hpp"
#include "leo/geometry.hpp"
#include "leo/montecarlo.hpp"
#include "leo/optimizer.hpp"
#include "leo/outage.hpp"

namespace leo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double deg(double rad) { return rad * 180.0 / kPi; }

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno != 0 ||
      text.find('-') != std::string::npos) {
    throw validation_error(what + ": expected an unsigned 64-bit integer, got '" +
                           text + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Option plumbing shared by every subcommand.

struct common_opts {
  std::string preset;
  std::vector<std::string> config_files;
  // Flag-layer overrides in the order given on the command line.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string format = "csv";
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, common_opts& o) {
  sub->add_option("--preset", o.preset,
                  "parameter preset: vsat-table1 or handheld-table1");
  sub->add_option("--config", o.config_files,
                  "config file (flat key=value or JSON); repeatable, later "
                  "files win");
  const auto override_opt = [sub, &o](const std::string& flag,
                                      const std::string& key,
                                      const std::string& desc) {
    sub->add_option_function<std::string>(
        flag,
        [&o, key](const std::string& v) { o.overrides.emplace_back(key, v); },
        desc);
  };
  override_opt("--terminal", "terminal", "terminal kind: vsat or handheld");
  override_opt("--S", "constellation.S", "number of satellites");
  override_opt("--a", "constellation.a", "shell altitude (km/m suffix)");
  override_opt("--r-e", "constellation.r_e", "ground-sphere radius (km/m)");
  override_opt("--theta", "theta_min", "minimum elevation angle (deg/rad)");
  override_opt("--omega-th", "antennas.omega_th",
               "main-lobe half beamwidth (deg/rad)");
  override_opt("--omega-e", "antennas.omega_e",
               "receiver pointing error (deg/rad)");
  override_opt("--g-t-ml", "antennas.g_t_ml", "main-lobe tx gain (dB or linear)");
  override_opt("--g-t-sl", "antennas.g_t_sl", "side-lobe tx gain (dB or linear)");
  override_opt("--g-r-max", "antennas.g_r_max", "peak rx gain (dB or linear)");
  override_opt("--f-c", "band.f_c", "carrier frequency (GHz/MHz/kHz/Hz)");
  override_opt("--W", "band.w", "bandwidth (GHz/MHz/kHz/Hz)");
  override_opt("--alpha", "band.alpha", "path-loss exponent");
  override_opt("--n0", "band.n0", "noise density (dBm/Hz or W/Hz)");
  override_opt("--eirp", "link.eirp_density", "EIRP density (dBW/MHz or W/Hz)");
  override_opt("--tx-power", "link.tx_power", "transmit power (dBW/dBm/W)");
  override_opt("--g", "link.rain_g", "rain attenuation (dB or linear)");
  override_opt("--fading", "fading.preset",
               "fading preset: fhs, fhs-paper, fhs-canonical, as or ils");
  override_opt("--model", "model", "placement model: exact or approx");
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out_path, "write the table to this file");
  sub->add_option_function<std::string>(
      "--seed",
      [&o](const std::string& v) {
        o.seed = parse_u64(v, "--seed");
        o.seed_set = true;
      },
      "Monte-Carlo seed (beats the LEO_MC_SEED environment variable)");
}

system_config build_config(const common_opts& o) {
  system_config cfg;
  if (!o.preset.empty()) cfg = preset_config(o.preset);
  for (const std::string& path : o.config_files) {
    cfg = load_config(path, std::move(cfg));
  }
  for (const auto& [key, value] : o.overrides) {
    apply_config_entry(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

// Figure baseline: named preset, then the figure's fixed fields, then the
// user's layers so every embedded default stays overridable. Loop axes are
// written per row afterwards and therefore always win.
system_config figure_config(
    const std::string& preset_name,
    const std::vector<std::pair<std::string, std::string>>& fixed,
    const common_opts& o, bool allow_preset_flag = true) {
  system_config cfg = preset_config(
      allow_preset_flag && !o.preset.empty() ? o.preset : preset_name);
  for (const auto& [key, value] : fixed) apply_config_entry(cfg, key, value);
  for (const std::string& path : o.config_files) {
    cfg = load_config(path, std::move(cfg));
  }
  for (const auto& [key, value] : o.overrides) {
    apply_config_entry(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

std::uint64_t resolve_seed(const common_opts& o) {
  if (o.seed_set) return o.seed;
  if (const char* env = std::getenv("LEO_MC_SEED")) {
    return parse_u64(env, "LEO_MC_SEED");
  }
  return trial_config{}.seed;
}

// ---------------------------------------------------------------------------
// Table emission.

struct out_table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

nlohmann::json cell_json(const std::string& s) {
  if (s.empty()) return nullptr;
  if (s.find_first_not_of("+-0123456789") == std::string::npos) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() && *end == '\0' && errno == 0) return v;
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() && *end == '\0' && std::isfinite(v)) return v;
  return s;
}

void emit(const common_opts& o, std::ostream& fallback, const out_table& t,
          const system_config* cfg, const nlohmann::json& meta) {
  std::ofstream file;
  std::ostream* out = &fallback;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) {
      throw validation_error("cannot open output file '" + o.out_path + "'");
    }
    out = &file;
  }
  if (o.format == "json") {
    nlohmann::json j;
    if (cfg != nullptr) {
      nlohmann::json jc = nlohmann::json::object();
      for (const auto& [key, value] : config_items(*cfg)) jc[key] = value;
      j["config"] = std::move(jc);
    }
    for (const auto& item : meta.items()) j[item.key()] = item.value();
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (const std::string& cell : row) jr.push_back(cell_json(cell));
      rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    *out << j.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    *out << (i ? "," : "") << t.columns[i];
  }
  *out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      *out << (i ? "," : "") << row[i];
    }
    *out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Shared evaluation helpers.

// Outage dispatch mirroring the optimizer: the Poisson limit uses the gamma
// closed form whenever alpha == 2 exactly and quadrature otherwise.
outage_result outage_of(const link_scene& sc, double rate, pp_model model) {
  if (model == pp_model::exact) return outage_exact(sc, rate);
  if (sc.budget.alpha == 2.0) return outage_approx_alpha2(sc, rate);
  return outage_approx(sc, rate);
}

case_probabilities probs_of(const link_scene& sc, pp_model model) {
  const geometry_derived der =
      derive_geometry(sc.earth, sc.theta_min, sc.omega_th);
  return case_probs(sc.sat_count, sc.earth, der, model);
}

// Deterministically ordered parallel fill; the first exception wins and is
// rethrown after the loop so it never crosses the worker region.
template <class Fn>
void fill_rows(std::vector<std::vector<std::string>>& rows, Fn&& fn) {
  std::exception_ptr error = nullptr;
  std::mutex error_mutex;
  const long long n = static_cast<long long>(rows.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs;
  if (n <= 1) {
    xs.push_back(lo);
    return xs;
  }
  xs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  }
  return xs;
}

std::vector<int> logspace_ints(int lo, int hi, int n) {
  std::vector<int> xs;
  const double llo = std::log10(static_cast<double>(lo));
  const double lhi = std::log10(static_cast<double>(hi));
  for (double e : linspace(llo, lhi, n)) {
    const int v = static_cast<int>(std::lround(std::pow(10.0, e)));
    if (xs.empty() || v != xs.back()) xs.push_back(v);
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Analytic subcommands.

out_table do_geometry(const system_config& cfg) {
  const earth_geometry g = to_geometry(cfg);
  const geometry_derived der = derive_geometry(g, cfg.theta_min, cfg.omega_th);
  out_table t;
  t.columns = {"d_max_m",  "psi_max_rad", "d_th_m",
               "psi_th_rad", "cap_fraction_vis", "area_total_m2",
               "area_vis_m2", "area_ml_m2", "area_sl_m2"};
  t.rows.push_back({num(der.d_max), num(der.psi_max), num(der.d_th),
                    num(der.psi_th), num(cap_fraction(g, der.d_max)),
                    num(der.area_total), num(der.area_vis), num(der.area_ml),
                    num(der.area_sl)});
  return t;
}

out_table do_case_probs(const system_config& cfg) {
  const case_probabilities cp = probs_of(to_scene(cfg), cfg.model);
  out_table t;
  t.columns = {"model", "p_ml", "p_sl", "p_inv", "p_vis"};
  t.rows.push_back({model_name(cfg.model), num(cp.p_ml), num(cp.p_sl),
                    num(cp.p_inv), num(cp.p_vis())});
  return t;
}

out_table do_dist(const system_config& cfg, const std::string& which,
                  const std::string& x_text, int points) {
  const earth_geometry g = to_geometry(cfg);
  const geometry_derived der = derive_geometry(g, cfg.theta_min, cfg.omega_th);
  double lo = g.a;
  double hi = 2.0 * g.r_e + g.a;
  if (which == "ml") hi = der.d_th;
  if (which == "sl") {
    lo = der.d_th;
    hi = der.d_max;
  }
  std::vector<double> xs;
  if (!x_text.empty()) {
    xs.push_back(parse_length_m(x_text, "--x"));
  } else {
    xs = linspace(lo, hi, points);
  }
  const auto law = [&](double x) -> distance_law {
    if (which == "ml") return serving_ml_dist(x, cfg.sat_count, g, der, cfg.model);
    if (which == "sl") return serving_sl_dist(x, cfg.sat_count, g, der, cfg.model);
    return nearest_dist(x, cfg.sat_count, g, cfg.model);
  };
  out_table t;
  t.columns = {"which", "x_m", "cdf", "pdf"};
  t.rows.resize(xs.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const distance_law d = law(xs[i]);
    return {which, num(xs[i]), num(d.cdf), num(d.pdf)};
  });
  return t;
}

out_table do_outage(const system_config& cfg, double rate) {
  const outage_result r = outage_of(to_scene(cfg), rate, cfg.model);
  out_table t;
  t.columns = {"p_out", "p_out_ml", "p_out_sl", "n_used"};
  t.rows.push_back({num(r.p_out), num(r.p_out_ml), num(r.p_out_sl),
                    std::to_string(r.n_used)});
  return t;
}

out_table do_throughput(const system_config& cfg, double rate) {
  const link_scene sc = to_scene(cfg);
  const case_probabilities cp = probs_of(sc, cfg.model);
  const double p_out = rate > 0.0 ? outage_of(sc, rate, cfg.model).p_out : 0.0;
  out_table t;
  t.columns = {"throughput", "p_vis", "p_out"};
  t.rows.push_back({num(cp.p_vis() * (1.0 - p_out) * rate), num(cp.p_vis()),
                    num(p_out)});
  return t;
}

struct optimize_opts {
  double eta = 0.9;
  double epsilon = 0.1;
  std::string delta_r = "0.01";
  std::string delta_theta = "0.1deg";
  double r_hat = 10.0;
  int max_iters = 50;
  std::string method = "iterative";
};

out_table do_optimize(const system_config& cfg, const optimize_opts& oo) {
  const link_scene sc = to_scene(cfg);
  opt_constraints c;
  c.eta = oo.eta;
  c.epsilon = oo.epsilon;
  c.delta_r = parse_plain_number(oo.delta_r, "--delta-r");
  c.delta_theta = parse_angle_rad(oo.delta_theta, "--delta-theta");
  c.r_hat = oo.r_hat;
  c.max_iters = oo.max_iters;
  out_table t;
  t.columns = {"method", "r_star", "theta_star_deg",
               "throughput", "iterations", "wall_ms"};
  const auto run_one = [&](const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    const opt_result r = name == "iterative"
                             ? optimize_iterative(sc, c, cfg.model)
                             : optimize_exhaustive(sc, c, cfg.model);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    t.rows.push_back({name, num(r.r_star), num(deg(r.theta_star)),
                      num(r.throughput), std::to_string(r.iterations),
                      num(ms)});
  };
  if (oo.method == "both" || oo.method == "iterative") run_one("iterative");
  if (oo.method == "both" || oo.method == "exhaustive") run_one("exhaustive");
  return t;
}

// ---------------------------------------------------------------------------
// Monte-Carlo subcommands.

struct sim_opts {
  long long trials = -1;
  int chunk_size = -1;
  std::string conditioning = "visible-only";
  std::string exec = "parallel";
};

trial_config make_trial_config(const common_opts& o, const sim_opts& so) {
  trial_config tc;
  if (so.trials > 0) tc.trials = so.trials;
  if (so.chunk_size > 0) tc.chunk_size = so.chunk_size;
  tc.conditioning = so.conditioning == "unconditional"
                        ? mc_conditioning::unconditional
                        : mc_conditioning::visible_only;
  tc.seed = resolve_seed(o);
  return tc;
}

exec_policy policy_of(const sim_opts& so) {
  return so.exec == "serial" ? exec_policy::serial : exec_policy::parallel;
}

out_table estimate_table(const mc_estimate& e) {
  out_table t;
  t.columns = {"estimate", "std_err", "trials_used", "trials_discarded"};
  t.rows.push_back({num(e.mean), num(e.std_err), std::to_string(e.trials_used),
                    std::to_string(e.trials_discarded)});
  return t;
}

out_table do_sim_case_probs(const system_config& cfg, const common_opts& o,
                            const sim_opts& so) {
  const trial_config tc = make_trial_config(o, so);
  const mc_case_probs cp =
      estimate_case_probs(to_geometry(cfg), cfg.theta_min, cfg.omega_th,
                          cfg.sat_count, tc, policy_of(so));
  out_table t;
  t.columns = {"p_ml", "p_ml_stderr", "p_sl", "p_sl_stderr",
               "p_inv", "p_inv_stderr", "trials"};
  t.rows.push_back({num(cp.ml.mean), num(cp.ml.std_err), num(cp.sl.mean),
                    num(cp.sl.std_err), num(cp.inv.mean), num(cp.inv.std_err),
                    std::to_string(tc.trials)});
  return t;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct sweep_opts {
  std::string variable;
  std::string lo;
  std::string hi;
  std::string step;
  int count = 0;
  bool log = false;
  double rate = 1.0;
};

std::vector<double> sweep_grid(const sweep_opts& so, double lo, double hi) {
  if (!(lo < hi)) {
    throw validation_error("sweep: --lo must be below --hi");
  }
  if (so.count > 0) {
    if (so.log) {
      if (!(lo > 0.0)) {
        throw validation_error("sweep: --log needs a positive --lo");
      }
      std::vector<double> xs;
      for (double e : linspace(std::log10(lo), std::log10(hi), so.count)) {
        xs.push_back(std::pow(10.0, e));
      }
      return xs;
    }
    return linspace(lo, hi, so.count);
  }
  if (so.step.empty()) {
    throw validation_error("sweep: give either --step or --count");
  }
  const double step = parse_plain_number(so.step, "--step") *
                      (so.variable == "theta_min" ? kPi / 180.0 : 1.0);
  if (!(step > 0.0)) throw validation_error("sweep: --step must be positive");
  std::vector<double> xs;
  const double slack = 1e-9 * std::max(1.0, std::fabs(hi));
  for (double v = lo; v <= hi + slack; v += step) xs.push_back(std::min(v, hi));
  return xs;
}

out_table do_sweep(const system_config& cfg, const sweep_opts& so) {
  const std::string& var = so.variable;
  double lo = 0.0;
  double hi = 0.0;
  if (var == "R") {
    lo = parse_plain_number(so.lo, "--lo");
    hi = parse_plain_number(so.hi, "--hi");
  } else if (var == "theta_min") {
    lo = parse_angle_rad(so.lo, "--lo");
    hi = parse_angle_rad(so.hi, "--hi");
  } else if (var == "a") {
    lo = parse_length_m(so.lo, "--lo");
    hi = parse_length_m(so.hi, "--hi");
  } else {  // S or N
    lo = static_cast<double>(parse_integer(so.lo, "--lo"));
    hi = static_cast<double>(parse_integer(so.hi, "--hi"));
  }
  std::vector<double> grid = sweep_grid(so, lo, hi);
  if (var == "S" || var == "N") {
    std::vector<double> ints;
    for (double v : grid) {
      const double r = std::round(v);
      if (ints.empty() || r != ints.back()) ints.push_back(r);
    }
    grid = std::move(ints);
  }

  const link_scene base = to_scene(cfg);
  out_table t;
  if (var == "N") {
    t.columns = {"variable", "value", "p_out_truncated", "increment"};
    t.rows.resize(grid.size());
    fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
      const int n = static_cast<int>(grid[i]);
      if (n < 0) throw validation_error("sweep: N must be nonnegative");
      const outage_result r = outage_approx_truncated(base, so.rate, n);
      const series_delta d = series_increment(n, base, so.rate);
      return {var, std::to_string(n), num(r.p_out), num(d.combined)};
    });
    return t;
  }

  t.columns = {"variable", "value", "p_vis", "p_out", "throughput"};
  t.rows.resize(grid.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    link_scene sc = base;
    double rate = so.rate;
    std::string display = num(grid[i]);
    if (var == "R") {
      rate = grid[i];
    } else if (var == "theta_min") {
      sc.theta_min = grid[i];
      display = num(deg(grid[i]));
    } else if (var == "S") {
      if (grid[i] < 1) throw validation_error("sweep: S must be at least 1");
      sc.sat_count = static_cast<int>(grid[i]);
      display = std::to_string(sc.sat_count);
    } else if (var == "a") {
      sc.earth.a = grid[i];
      display = num(grid[i] / 1000.0);
    }
    const case_probabilities cp = probs_of(sc, cfg.model);
    const double p_out =
        rate > 0.0 ? outage_of(sc, rate, cfg.model).p_out : 0.0;
    return {var, display, num(cp.p_vis()), num(p_out),
            num(cp.p_vis() * (1.0 - p_out) * rate)};
  });
  return t;
}

// ---------------------------------------------------------------------------
// Figure reproductions. Each embeds its source sweep as defaults; fixed
// scalars remain overridable through the usual flags while the loop axes are
// written per row.

struct figure_opts {
  std::string name;
  long long trials = 20000;
  std::string method = "iterative";
};

out_table fig_case_probs_vs_s(const common_opts& o) {
  const system_config cfg =
      figure_config("vsat-table1", {{"constellation.a", "1200km"}}, o);
  const earth_geometry g = to_geometry(cfg);
  const geometry_derived der = derive_geometry(g, cfg.theta_min, cfg.omega_th);
  const std::vector<int> ss = logspace_ints(1, 1000, 40);
  out_table t;
  t.columns = {"s",          "p_ml_exact",  "p_sl_exact", "p_inv_exact",
               "p_ml_approx", "p_sl_approx", "p_inv_approx"};
  t.rows.resize(ss.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const case_probabilities e = case_probs(ss[i], g, der, pp_model::exact);
    const case_probabilities p = case_probs(ss[i], g, der, pp_model::approx);
    return {std::to_string(ss[i]), num(e.p_ml),  num(e.p_sl), num(e.p_inv),
            num(p.p_ml),           num(p.p_sl), num(p.p_inv)};
  });
  return t;
}

out_table fig_nearest_law(const common_opts& o) {
  const system_config cfg =
      figure_config("vsat-table1", {{"constellation.a", "600km"}}, o);
  const earth_geometry g = to_geometry(cfg);
  const std::vector<int> ss = {1, 10, 100};
  const std::vector<double> xs = linspace(g.a, max_slant_range(g, 0.0), 200);
  out_table t;
  t.columns = {"s",          "x_km",      "cdf_exact", "pdf_exact",
               "cdf_approx", "pdf_approx"};
  t.rows.resize(ss.size() * xs.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const int s = ss[i / xs.size()];
    const double x = xs[i % xs.size()];
    const distance_law e = nearest_dist(x, s, g, pp_model::exact);
    const distance_law p = nearest_dist(x, s, g, pp_model::approx);
    return {std::to_string(s), num(x / 1000.0), num(e.cdf), num(e.pdf),
            num(p.cdf),        num(p.pdf)};
  });
  return t;
}

out_table fig_visibility(const common_opts& o, const figure_opts& fo) {
  const system_config cfg = figure_config("vsat-table1", {}, o);
  const std::vector<double> alts = {300e3, 600e3, 1200e3};
  std::vector<double> thetas;
  for (int d = 0; d <= 90; d += 2) thetas.push_back(d * kPi / 180.0);
  trial_config tc;
  tc.trials = fo.trials;
  tc.seed = resolve_seed(o);
  out_table t;
  t.columns = {"theta_min_deg", "a_km",     "p_vis_exact",
               "p_vis_approx",  "p_vis_mc", "mc_stderr"};
  for (double a : alts) {
    earth_geometry g = to_geometry(cfg);
    g.a = a;
    for (double theta : thetas) {
      const geometry_derived der = derive_geometry(g, theta, cfg.omega_th);
      const case_probabilities e =
          case_probs(cfg.sat_count, g, der, pp_model::exact);
      const case_probabilities p =
          case_probs(cfg.sat_count, g, der, pp_model::approx);
      const mc_case_probs mc =
          estimate_case_probs(g, theta, cfg.omega_th, cfg.sat_count, tc);
      const double p_vis = mc.ml.mean + mc.sl.mean;
      const double se =
          std::sqrt(std::max(0.0, p_vis * (1.0 - p_vis)) /
                    static_cast<double>(mc.ml.trials_used));
      t.rows.push_back({num(deg(theta)), num(a / 1000.0), num(e.p_vis()),
                        num(p.p_vis()), num(p_vis), num(se)});
    }
  }
  return t;
}

// Shared loop for the rate-axis outage/throughput figures.
out_table fig_rate_axis(const common_opts& o, bool throughput_rows) {
  const std::vector<std::string> terminals = {"vsat-table1", "handheld-table1"};
  const std::vector<std::string> fadings = {"fhs", "as", "ils"};
  std::vector<double> rates;
  for (int k = 1; k <= 32; ++k) rates.push_back(0.25 * k);

  out_table t;
  t.columns = throughput_rows
                  ? std::vector<std::string>{"terminal", "fading", "r",
                                             "t_exact", "t_approx"}
                  : std::vector<std::string>{"terminal", "fading", "r",
                                             "p_out_exact", "p_out_approx"};
  std::vector<link_scene> scenes;
  std::vector<std::string> term_names;
  std::vector<std::string> fade_names;
  for (const std::string& preset : terminals) {
    for (const std::string& fading : fadings) {
      system_config cfg =
          figure_config(preset, {{"fading.preset", fading}}, o,
                        /*allow_preset_flag=*/false);
      scenes.push_back(to_scene(cfg));
      term_names.push_back(terminal_name(cfg.terminal));
      fade_names.push_back(fading);
    }
  }
  t.rows.resize(scenes.size() * rates.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const std::size_t si = i / rates.size();
    const double r = rates[i % rates.size()];
    const link_scene& sc = scenes[si];
    if (throughput_rows) {
      const double te = throughput(sc, r, sc.theta_min, pp_model::exact);
      const double tp = throughput(sc, r, sc.theta_min, pp_model::approx);
      return {term_names[si], fade_names[si], num(r), num(te), num(tp)};
    }
    const double pe = outage_of(sc, r, pp_model::exact).p_out;
    const double pp = outage_of(sc, r, pp_model::approx).p_out;
    return {term_names[si], fade_names[si], num(r), num(pe), num(pp)};
  });
  return t;
}

out_table fig_outage_vs_s(const common_opts& o) {
  const system_config cfg =
      figure_config("handheld-table1", {{"fading.preset", "ils"}}, o);
  const link_scene base = to_scene(cfg);
  const double rate = 1.0;
  const double asym = outage_asymptotic(base, rate);
  const std::vector<int> ss = logspace_ints(1, 1000, 30);
  out_table t;
  t.columns = {"s", "p_out_exact", "p_out_approx", "p_out_asymptotic"};
  t.rows.resize(ss.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    link_scene sc = base;
    sc.sat_count = ss[i];
    const double pe = outage_of(sc, rate, pp_model::exact).p_out;
    const double pp = outage_of(sc, rate, pp_model::approx).p_out;
    return {std::to_string(ss[i]), num(pe), num(pp), num(asym)};
  });
  return t;
}

out_table fig_truncation(const common_opts& o) {
  const system_config cfg =
      figure_config("vsat-table1", {{"fading.preset", "as"}}, o);
  const link_scene sc = to_scene(cfg);
  const double rate = 1.0;
  out_table t;
  t.columns = {"n", "p_out_truncated", "increment"};
  t.rows.resize(61);
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const int n = static_cast<int>(i);
    const outage_result r = outage_approx_truncated(sc, rate, n);
    const series_delta d = series_increment(n, sc, rate);
    return {std::to_string(n), num(r.p_out), num(d.combined)};
  });
  return t;
}

out_table fig_outage_vs_theta(const common_opts& o) {
  const std::vector<std::string> terminals = {"vsat-table1", "handheld-table1"};
  const std::vector<double> alts = {300e3, 600e3, 1200e3};
  const double rate = 0.5;
  std::vector<double> thetas;
  for (int d = 0; d <= 50; ++d) thetas.push_back(d * kPi / 180.0);
  out_table t;
  t.columns = {"terminal", "a_km", "theta_min_deg", "p_out_exact",
               "p_out_approx"};
  std::vector<link_scene> scenes;
  std::vector<std::string> term_names;
  for (const std::string& preset : terminals) {
    system_config cfg = figure_config(
        preset, {{"fading.preset", "fhs"}, {"link.rain_g", "-3dB"}}, o,
        /*allow_preset_flag=*/false);
    scenes.push_back(to_scene(cfg));
    term_names.push_back(terminal_name(cfg.terminal));
  }
  t.rows.resize(scenes.size() * alts.size() * thetas.size());
  fill_rows(t.rows, [&](std::size_t i) -> std::vector<std::string> {
    const std::size_t per_term = alts.size() * thetas.size();
    const std::size_t si = i / per_term;
    const double a = alts[(i % per_term) / thetas.size()];
    const double theta = thetas[i % thetas.size()];
    link_scene sc = scenes[si];
    sc.earth.a = a;
    sc.theta_min = theta;
    const double pe = outage_of(sc, rate, pp_model::exact).p_out;
    const double pp = outage_of(sc, rate, pp_model::approx).p_out;
    return {term_names[si], num(a / 1000.0), num(deg(theta)), num(pe),
            num(pp)};
  });
  return t;
}

out_table fig_max_throughput(const common_opts& o, const figure_opts& fo) {
  const system_config base = figure_config(
      "vsat-table1", {{"fading.preset", "as"}, {"model", "approx"}}, o);
  const std::vector<double> rains = {1.0, std::pow(10.0, -0.3)};
  const std::vector<double> omegas = {0.0, 1.0};
  const std::vector<int> ss = {50, 100, 200, 400, 700, 1000};
  std::vector<std::string> methods;
  if (fo.method == "both" || fo.method == "iterative") {
    methods.push_back("iterative");
  }
  if (fo.method == "both" || fo.method == "exhaustive") {
    methods.push_back("exhaustive");
  }
  opt_constraints c;
  c.eta = 0.9;
  c.epsilon = 0.1;
  c.delta_r = 0.01;
  c.delta_theta = 0.1 * kPi / 180.0;

  out_table t;
  t.columns = {"s",          "g_db",       "omega_e_deg", "method", "status",
               "r_star",     "theta_star_deg", "throughput", "iterations",
               "wall_ms"};
  for (double rain : rains) {
    for (double omega_e : omegas) {
      for (int s : ss) {
        system_config cfg = base;
        cfg.rain_g = rain;
        cfg.omega_e_deg = omega_e;
        cfg.sat_count = s;
        const link_scene sc = to_scene(cfg);
        for (const std::string& method : methods) {
          const auto t0 = std::chrono::steady_clock::now();
          std::string status = "ok";
          opt_result r;
          try {
            r = method == "iterative"
                    ? optimize_iterative(sc, c, cfg.model)
                    : optimize_exhaustive(sc, c, cfg.model);
          } catch (const error& e) {
            status = e.kind();
          }
          const auto t1 = std::chrono::steady_clock::now();
          const double ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          std::vector<std::string> row = {
              std::to_string(s), num(10.0 * std::log10(rain)), num(omega_e),
              method, status};
          if (status == "ok") {
            row.insert(row.end(),
                       {num(r.r_star), num(deg(r.theta_star)),
                        num(r.throughput), std::to_string(r.iterations)});
          } else {
            row.insert(row.end(), {"", "", "", ""});
          }
          row.push_back(num(ms));
          t.rows.push_back(std::move(row));
        }
      }
    }
  }
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"LEO downlink coverage, outage and throughput analysis"};
  app.require_subcommand(1);

  common_opts o;
  double rate = 0.0;

  CLI::App* geometry_cmd =
      app.add_subcommand("geometry", "derived shell/visibility geometry");
  add_common(geometry_cmd, o);

  CLI::App* case_cmd =
      app.add_subcommand("case-probs", "service-case probabilities");
  add_common(case_cmd, o);

  CLI::App* dist_cmd =
      app.add_subcommand("dist", "nearest/serving distance laws");
  add_common(dist_cmd, o);
  std::string dist_which = "nearest";
  std::string dist_x;
  int dist_points = 100;
  dist_cmd->add_option("--which", dist_which, "law: nearest, ml or sl")
      ->check(CLI::IsMember({"nearest", "ml", "sl"}));
  dist_cmd->add_option("--x", dist_x, "single evaluation point (km/m)");
  dist_cmd->add_option("--points", dist_points, "grid size when --x is absent")
      ->check(CLI::PositiveNumber);

  CLI::App* outage_cmd =
      app.add_subcommand("outage", "outage probability at a rate");
  add_common(outage_cmd, o);
  outage_cmd->add_option("--R", rate, "rate threshold [bps/Hz]")->required();

  CLI::App* thr_cmd =
      app.add_subcommand("throughput", "system throughput at a rate");
  add_common(thr_cmd, o);
  thr_cmd->add_option("--R", rate, "rate threshold [bps/Hz]")->required();

  CLI::App* opt_cmd =
      app.add_subcommand("optimize", "constrained throughput maximization");
  add_common(opt_cmd, o);
  optimize_opts oo;
  opt_cmd->add_option("--eta", oo.eta, "visibility floor");
  opt_cmd->add_option("--eps", oo.epsilon, "outage ceiling");
  opt_cmd->add_option("--delta-r", oo.delta_r, "rate grid step");
  opt_cmd->add_option("--delta-theta", oo.delta_theta,
                      "angle grid step (deg/rad)");
  opt_cmd->add_option("--r-hat", oo.r_hat, "rate upper bound for the grid");
  opt_cmd->add_option("--max-iters", oo.max_iters, "alternation cap");
  opt_cmd->add_option("--method", oo.method, "iterative, exhaustive or both")
      ->check(CLI::IsMember({"iterative", "exhaustive", "both"}));

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Monte-Carlo estimators");
  sim_cmd->require_subcommand(1);
  sim_opts so;
  const auto add_sim = [&](CLI::App* sub, bool with_rate) {
    add_common(sub, o);
    sub->add_option("--trials", so.trials, "number of trials");
    sub->add_option("--chunk-size", so.chunk_size, "trials per RNG chunk");
    sub->add_option("--conditioning", so.conditioning,
                    "visible-only or unconditional")
        ->check(CLI::IsMember({"visible-only", "unconditional"}));
    sub->add_option("--exec", so.exec, "serial or parallel chunk loop")
        ->check(CLI::IsMember({"serial", "parallel"}));
    if (with_rate) {
      sub->add_option("--R", rate, "rate threshold [bps/Hz]")->required();
    }
  };
  CLI::App* sim_outage =
      sim_cmd->add_subcommand("outage", "outage frequency estimate");
  add_sim(sim_outage, true);
  CLI::App* sim_thr =
      sim_cmd->add_subcommand("throughput", "throughput estimate");
  add_sim(sim_thr, true);
  CLI::App* sim_cases =
      sim_cmd->add_subcommand("case-probs", "service-case frequencies");
  add_sim(sim_cases, false);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "grid sweep of analytic quantities");
  add_common(sweep_cmd, o);
  sweep_opts sw;
  sweep_cmd->add_option("--var", sw.variable, "R, theta_min, S, a or N")
      ->required()
      ->check(CLI::IsMember({"R", "theta_min", "S", "a", "N"}));
  sweep_cmd->add_option("--lo", sw.lo, "range start (units per variable)")
      ->required();
  sweep_cmd->add_option("--hi", sw.hi, "range end")->required();
  sweep_cmd->add_option("--step", sw.step,
                        "grid step (deg for theta_min; SI otherwise)");
  sweep_cmd->add_option("--count", sw.count, "number of grid points");
  sweep_cmd->add_flag("--log", sw.log, "log-spaced grid (with --count)");
  sweep_cmd->add_option("--R", sw.rate,
                        "rate for outage/throughput columns [bps/Hz]");

  CLI::App* fig_cmd =
      app.add_subcommand("figure", "published-curve data reproductions");
  add_common(fig_cmd, o);
  figure_opts fo;
  fig_cmd->add_option("name", fo.name, "figure name")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig5", "fig6", "fig7", "fig8",
                             "fig9", "fig10", "fig11"}));
  fig_cmd->add_option("--trials", fo.trials,
                      "Monte-Carlo trials per point (fig5)");
  fig_cmd->add_option("--method", fo.method,
                      "fig11 solver: iterative, exhaustive or both")
      ->check(CLI::IsMember({"iterative", "exhaustive", "both"}));

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("leo");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const std::string& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (geometry_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_geometry(cfg), &cfg, {});
    } else if (case_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_case_probs(cfg), &cfg, {});
    } else if (dist_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_dist(cfg, dist_which, dist_x, dist_points), &cfg, {});
    } else if (outage_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_outage(cfg, rate), &cfg, {});
    } else if (thr_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_throughput(cfg, rate), &cfg, {});
    } else if (opt_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_optimize(cfg, oo), &cfg, {});
    } else if (sim_cmd->parsed()) {
      const system_config cfg = build_config(o);
      const trial_config tc = make_trial_config(o, so);
      if (sim_outage->parsed()) {
        emit(o, out,
             estimate_table(
                 estimate_outage(to_scene(cfg), rate, tc, policy_of(so))),
             &cfg, {});
      } else if (sim_thr->parsed()) {
        emit(o, out,
             estimate_table(estimate_throughput(to_scene(cfg), rate,
                                                cfg.theta_min, tc,
                                                policy_of(so))),
             &cfg, {});
      } else {
        emit(o, out, do_sim_case_probs(cfg, o, so), &cfg, {});
      }
    } else if (sweep_cmd->parsed()) {
      const system_config cfg = build_config(o);
      emit(o, out, do_sweep(cfg, sw), &cfg,
           nlohmann::json{{"sweep", sw.variable}});
    } else if (fig_cmd->parsed()) {
      out_table t;
      if (fo.name == "fig2") t = fig_case_probs_vs_s(o);
      if (fo.name == "fig3") t = fig_nearest_law(o);
      if (fo.name == "fig5") t = fig_visibility(o, fo);
      if (fo.name == "fig6") t = fig_rate_axis(o, /*throughput_rows=*/false);
      if (fo.name == "fig7") t = fig_rate_axis(o, /*throughput_rows=*/true);
      if (fo.name == "fig8") t = fig_outage_vs_s(o);
      if (fo.name == "fig9") t = fig_truncation(o);
      if (fo.name == "fig10") t = fig_outage_vs_theta(o);
      if (fo.name == "fig11") t = fig_max_throughput(o, fo);
      emit(o, out, t, nullptr, nlohmann::json{{"figure", fo.name}});
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const parse_error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const validation_error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const domain_error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace leo
