#pragma once
// Flat key/value configuration for the command-line front end.
//
// A configuration file is UTF-8 text, one `key = value` pair per line, with
// `#` starting a comment and blank lines ignored.  Keys are dotted
// (`constellation.a`, `antennas.g_t_ml`); values carry unit suffixes where
// the quantity is dimensioned.  Angles require `deg` or `rad` and lengths
// require `km` or `m` -- a bare number for either is rejected so that a
// config can never be misread by a factor of a thousand.  Gains accept `dB`
// / `dBi` or a bare linear value, noise density accepts `dBm/Hz` or a bare
// W/Hz value, EIRP density accepts `dBW/MHz` or a bare W/Hz value, and
// frequencies accept `GHz` / `MHz` / `kHz` / `Hz` (bare means Hz).
//
// The same file may instead hold a single JSON object with the same dotted
// keys (unit-suffixed values as strings); files produced by the CLI's JSON
// output mode round-trip through this loader unchanged.
//
// Precedence is defaults < preset < config file < command-line flags; each
// layer is applied through the same setter so the semantics cannot drift.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leo/channel.hpp"
#include "leo/geometry.hpp"
#include "leo/outage.hpp"

namespace leo {

enum class terminal_kind { vsat, handheld };

// Resolved system description.  Angles are stored in radians except
// omega_e_deg (the receiver boresight offset), which is kept in degrees
// because the receive-gain mask is specified on a degree grid.  Gains and
// the rain factor are linear, powers are watts, frequencies hertz.
struct system_config {
  terminal_kind terminal = terminal_kind::vsat;

  int sat_count = 100;
  double altitude_m = 600e3;
  double earth_radius_m = 6378e3;

  double carrier_hz = 20e9;
  double bandwidth_hz = 100e6;
  double path_loss_exp = 2.0;
  double noise_density = std::pow(10.0, -20.4);  // -174 dBm/Hz
  double light_speed = 3e8;

  double g_t_ml = std::pow(10.0, 3.85);  // 38.5 dBi
  double g_t_sl = std::pow(10.0, 2.85);  // 28.5 dBi
  double omega_th = 0.3490658503988659;  // 20 deg
  double g_r_max = std::pow(10.0, 3.97);  // 39.7 dBi
  double omega_e_deg = 0.0;

  // Exactly one of these two is set; the transmit power otherwise derives
  // from the EIRP density as P = eirp * W / g_t_ml.
  std::optional<double> eirp_density = std::pow(10.0, 0.4) / 1e6;  // 4 dBW/MHz
  std::optional<double> tx_power;
  double rain_g = 1.0;

  // Either a named preset or explicit parameters.
  std::string fading_name = "as";
  std::optional<shadowed_rician_params> fading_explicit;

  double theta_min = 0.17453292519943295;  // 10 deg
  pp_model model = pp_model::exact;
};

// Named parameter bundles matching the published system table.
// Known names: "vsat-table1", "handheld-table1".
system_config preset_config(const std::string& name);

// Applies one `key = value` assignment.  Throws validation_error for an
// unknown key, a malformed value, or a missing required unit suffix.
void apply_config_entry(system_config& cfg, const std::string& key,
                        const std::string& value);

// Loads a config file (text or JSON form, detected by content) on top of
// `base`.  Throws parse_error with the line number for malformed lines and
// validation_error (naming the key) for bad assignments.
system_config load_config(const std::string& path, system_config base);

// Cross-field checks; throws validation_error naming the offending key.
void validate_config(const system_config& cfg);

// Canonical flat listing of every resolved key, in emission order, with
// unit-suffixed string values.  Feeding these back through
// apply_config_entry reproduces the configuration exactly.
std::vector<std::pair<std::string, std::string>> config_items(
    const system_config& cfg);

// Assembled library inputs.  to_budget applies the receive-gain mask for
// the VSAT terminal and the EIRP-derived transmit power.
earth_geometry to_geometry(const system_config& cfg);
link_budget to_budget(const system_config& cfg);
shadowed_rician_params to_fading(const system_config& cfg);
link_scene to_scene(const system_config& cfg);

double resolved_tx_power(const system_config& cfg);
double resolved_rx_gain(const system_config& cfg);

// Unit-aware scalar parsers (shared with command-line flags).  Each throws
// validation_error mentioning `what` on a malformed value.
double parse_angle_rad(const std::string& text, const std::string& what);
double parse_length_m(const std::string& text, const std::string& what);
double parse_frequency_hz(const std::string& text, const std::string& what);
double parse_gain_linear(const std::string& text, const std::string& what);
double parse_noise_density(const std::string& text, const std::string& what);
double parse_eirp_density(const std::string& text, const std::string& what);
double parse_power_w(const std::string& text, const std::string& what);
double parse_plain_number(const std::string& text, const std::string& what);
std::int64_t parse_integer(const std::string& text, const std::string& what);

const char* terminal_name(terminal_kind t);
const char* model_name(pp_model m);

}  // namespace leo
