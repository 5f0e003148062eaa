#include "leo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "leo/errors.hpp"

namespace leo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Splits "12.5 km" into the numeric value and the normalized (lowercase,
// space-free) suffix. Throws when no number leads the text.
struct split_value {
  double number = 0.0;
  std::string suffix;
};

split_value split_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) {
    throw validation_error(what + ": expected a number, got '" + t + "'");
  }
  if (!std::isfinite(v)) {
    throw validation_error(what + ": value '" + t + "' is not finite");
  }
  std::string suffix;
  for (const char* p = end; *p; ++p) {
    if (!std::isspace(static_cast<unsigned char>(*p))) suffix.push_back(*p);
  }
  return {v, lower(suffix)};
}

[[noreturn]] void bad_suffix(const std::string& what, const std::string& suffix,
                             const std::string& expected) {
  throw validation_error(what + ": unknown unit '" + suffix + "' (expected " +
                         expected + ")");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double parse_angle_rad(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "deg") return sv.number * kPi / 180.0;
  if (sv.suffix == "rad") return sv.number;
  if (sv.suffix.empty()) {
    throw validation_error(what + ": angle '" + trim(text) +
                           "' needs an explicit deg or rad suffix");
  }
  bad_suffix(what, sv.suffix, "deg or rad");
}

double parse_length_m(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "km") return sv.number * 1000.0;
  if (sv.suffix == "m") return sv.number;
  if (sv.suffix.empty()) {
    throw validation_error(what + ": length '" + trim(text) +
                           "' needs an explicit km or m suffix");
  }
  bad_suffix(what, sv.suffix, "km or m");
}

double parse_frequency_hz(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "ghz") return sv.number * 1e9;
  if (sv.suffix == "mhz") return sv.number * 1e6;
  if (sv.suffix == "khz") return sv.number * 1e3;
  if (sv.suffix == "hz" || sv.suffix.empty()) return sv.number;
  bad_suffix(what, sv.suffix, "GHz, MHz, kHz or Hz");
}

double parse_gain_linear(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "db" || sv.suffix == "dbi") {
    return std::pow(10.0, sv.number / 10.0);
  }
  if (sv.suffix.empty()) return sv.number;
  bad_suffix(what, sv.suffix, "dB, dBi or a bare linear value");
}

double parse_noise_density(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "dbm/hz") return std::pow(10.0, (sv.number - 30.0) / 10.0);
  if (sv.suffix.empty()) return sv.number;
  bad_suffix(what, sv.suffix, "dBm/Hz or a bare W/Hz value");
}

double parse_eirp_density(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "dbw/mhz") return std::pow(10.0, sv.number / 10.0) / 1e6;
  if (sv.suffix.empty()) return sv.number;
  bad_suffix(what, sv.suffix, "dBW/MHz or a bare W/Hz value");
}

double parse_power_w(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (sv.suffix == "dbw") return std::pow(10.0, sv.number / 10.0);
  if (sv.suffix == "dbm") return std::pow(10.0, (sv.number - 30.0) / 10.0);
  if (sv.suffix == "w" || sv.suffix.empty()) return sv.number;
  bad_suffix(what, sv.suffix, "dBW, dBm, W or a bare watt value");
}

double parse_plain_number(const std::string& text, const std::string& what) {
  const split_value sv = split_number(text, what);
  if (!sv.suffix.empty()) bad_suffix(what, sv.suffix, "a bare number");
  return sv.number;
}

std::int64_t parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw validation_error(what + ": expected an integer, got '" + t + "'");
  }
  return v;
}

const char* terminal_name(terminal_kind t) {
  return t == terminal_kind::vsat ? "vsat" : "handheld";
}

const char* model_name(pp_model m) {
  return m == pp_model::exact ? "exact" : "approx";
}

system_config preset_config(const std::string& name) {
  system_config cfg;  // defaults already hold the Ka-band VSAT column
  if (name == "vsat-table1") return cfg;
  if (name == "handheld-table1") {
    cfg.terminal = terminal_kind::handheld;
    cfg.carrier_hz = 2e9;
    cfg.bandwidth_hz = 10e6;
    cfg.g_t_ml = 1000.0;  // 30 dBi
    cfg.g_t_sl = 100.0;   // 20 dBi
    cfg.g_r_max = 1.0;    // 0 dBi
    cfg.eirp_density = std::pow(10.0, 3.4) / 1e6;  // 34 dBW/MHz
    return cfg;
  }
  throw validation_error("unknown preset '" + name +
                         "' (known: vsat-table1, handheld-table1)");
}

namespace {

shadowed_rician_params resolved_fading(const system_config& cfg) {
  if (cfg.fading_explicit) return *cfg.fading_explicit;
  return fading_preset(cfg.fading_name);
}

// Promotes the fading to explicit parameters so a single component can be
// overridden on top of whatever preset was active.
shadowed_rician_params& explicit_fading(system_config& cfg) {
  if (!cfg.fading_explicit) cfg.fading_explicit = resolved_fading(cfg);
  return *cfg.fading_explicit;
}

}  // namespace

void apply_config_entry(system_config& cfg, const std::string& key,
                        const std::string& value) {
  const std::string v = trim(value);
  if (key == "terminal") {
    const std::string name = lower(v);
    if (name == "vsat") {
      cfg.terminal = terminal_kind::vsat;
    } else if (name == "handheld") {
      cfg.terminal = terminal_kind::handheld;
    } else {
      throw validation_error("terminal: unknown terminal '" + v +
                             "' (expected vsat or handheld)");
    }
  } else if (key == "model") {
    const std::string name = lower(v);
    if (name == "exact") {
      cfg.model = pp_model::exact;
    } else if (name == "approx") {
      cfg.model = pp_model::approx;
    } else {
      throw validation_error("model: unknown model '" + v +
                             "' (expected exact or approx)");
    }
  } else if (key == "constellation.S") {
    cfg.sat_count = static_cast<int>(parse_integer(v, key));
  } else if (key == "constellation.a") {
    cfg.altitude_m = parse_length_m(v, key);
  } else if (key == "constellation.r_e") {
    cfg.earth_radius_m = parse_length_m(v, key);
  } else if (key == "band.f_c") {
    cfg.carrier_hz = parse_frequency_hz(v, key);
  } else if (key == "band.w") {
    cfg.bandwidth_hz = parse_frequency_hz(v, key);
  } else if (key == "band.alpha") {
    cfg.path_loss_exp = parse_plain_number(v, key);
  } else if (key == "band.n0") {
    cfg.noise_density = parse_noise_density(v, key);
  } else if (key == "band.c") {
    cfg.light_speed = parse_plain_number(v, key);
  } else if (key == "antennas.g_t_ml") {
    cfg.g_t_ml = parse_gain_linear(v, key);
  } else if (key == "antennas.g_t_sl") {
    cfg.g_t_sl = parse_gain_linear(v, key);
  } else if (key == "antennas.omega_th") {
    cfg.omega_th = parse_angle_rad(v, key);
  } else if (key == "antennas.g_r_max") {
    cfg.g_r_max = parse_gain_linear(v, key);
  } else if (key == "antennas.omega_e") {
    cfg.omega_e_deg = parse_angle_rad(v, key) * 180.0 / kPi;
  } else if (key == "link.eirp_density") {
    cfg.eirp_density = parse_eirp_density(v, key);
    cfg.tx_power.reset();
  } else if (key == "link.tx_power") {
    cfg.tx_power = parse_power_w(v, key);
    cfg.eirp_density.reset();
  } else if (key == "link.rain_g") {
    cfg.rain_g = parse_gain_linear(v, key);
  } else if (key == "fading.preset") {
    fading_preset(v);  // reject unknown names here, with the key in the message
    cfg.fading_name = v;
    cfg.fading_explicit.reset();
  } else if (key == "fading.b") {
    explicit_fading(cfg).b = parse_plain_number(v, key);
  } else if (key == "fading.m") {
    explicit_fading(cfg).m = parse_plain_number(v, key);
  } else if (key == "fading.omega") {
    explicit_fading(cfg).omega = parse_plain_number(v, key);
  } else if (key == "theta_min") {
    cfg.theta_min = parse_angle_rad(v, key);
  } else {
    throw validation_error("unknown configuration key '" + key + "'");
  }
}

namespace {

system_config load_json_config(const std::string& path,
                               const std::string& content,
                               system_config cfg) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(path + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) {
    throw parse_error(path + ": JSON config must be an object");
  }
  // A full CLI JSON report embeds the configuration under "config"; accept
  // either the report or the bare object.
  const nlohmann::json& obj =
      (root.contains("config") && root["config"].is_object()) ? root["config"]
                                                               : root;
  for (const auto& item : obj.items()) {
    std::string value;
    if (item.value().is_string()) {
      value = item.value().get<std::string>();
    } else if (item.value().is_number()) {
      value = fmt(item.value().get<double>());
    } else {
      throw validation_error(path + ": key '" + item.key() +
                             "' must be a string or number");
    }
    try {
      apply_config_entry(cfg, item.key(), value);
    } catch (const validation_error& e) {
      throw validation_error(path + ": " + e.what());
    }
  }
  return cfg;
}

}  // namespace

system_config load_config(const std::string& path, system_config base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  const std::string head = trim(content);
  if (!head.empty() && head.front() == '{') {
    return load_json_config(path, content, std::move(base));
  }

  system_config cfg = std::move(base);
  std::istringstream lines(content);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": empty key or value");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const validation_error& e) {
      throw validation_error(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
    }
  }
  return cfg;
}

void validate_config(const system_config& cfg) {
  const auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw validation_error(std::string(key) + ": must be positive, got " +
                             fmt(v));
    }
  };
  if (cfg.sat_count < 1) {
    throw validation_error("constellation.S: must be at least 1, got " +
                           std::to_string(cfg.sat_count));
  }
  positive(cfg.altitude_m, "constellation.a");
  positive(cfg.earth_radius_m, "constellation.r_e");
  positive(cfg.carrier_hz, "band.f_c");
  positive(cfg.bandwidth_hz, "band.w");
  positive(cfg.path_loss_exp, "band.alpha");
  positive(cfg.noise_density, "band.n0");
  positive(cfg.light_speed, "band.c");
  positive(cfg.g_t_ml, "antennas.g_t_ml");
  positive(cfg.g_t_sl, "antennas.g_t_sl");
  positive(cfg.g_r_max, "antennas.g_r_max");
  if (!(cfg.omega_th > 0.0) || !(cfg.omega_th <= kPi / 2)) {
    throw validation_error("antennas.omega_th: must lie in (0, pi/2], got " +
                           fmt(cfg.omega_th) + " rad");
  }
  if (!(cfg.omega_e_deg >= 0.0) || !(cfg.omega_e_deg <= 180.0)) {
    throw validation_error("antennas.omega_e: must lie in [0, 180] deg, got " +
                           fmt(cfg.omega_e_deg) + " deg");
  }
  if (!(cfg.rain_g > 0.0) || !(cfg.rain_g <= 1.0)) {
    throw validation_error("link.rain_g: must lie in (0, 1], got " +
                           fmt(cfg.rain_g));
  }
  if (!(cfg.theta_min >= 0.0) || !(cfg.theta_min < kPi / 2)) {
    throw validation_error("theta_min: must lie in [0, pi/2), got " +
                           fmt(cfg.theta_min) + " rad");
  }
  if (cfg.eirp_density.has_value() == cfg.tx_power.has_value()) {
    throw validation_error(
        "link: exactly one of link.eirp_density and link.tx_power must be "
        "set");
  }
  if (cfg.eirp_density) positive(*cfg.eirp_density, "link.eirp_density");
  if (cfg.tx_power) positive(*cfg.tx_power, "link.tx_power");
  if (cfg.fading_explicit) {
    positive(cfg.fading_explicit->b, "fading.b");
    positive(cfg.fading_explicit->m, "fading.m");
    positive(cfg.fading_explicit->omega, "fading.omega");
  } else {
    fading_preset(cfg.fading_name);
  }
}

std::vector<std::pair<std::string, std::string>> config_items(
    const system_config& cfg) {
  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("terminal", terminal_name(cfg.terminal));
  items.emplace_back("model", model_name(cfg.model));
  items.emplace_back("constellation.S", std::to_string(cfg.sat_count));
  items.emplace_back("constellation.a", fmt(cfg.altitude_m) + "m");
  items.emplace_back("constellation.r_e", fmt(cfg.earth_radius_m) + "m");
  items.emplace_back("theta_min", fmt(cfg.theta_min) + "rad");
  items.emplace_back("band.f_c", fmt(cfg.carrier_hz));
  items.emplace_back("band.w", fmt(cfg.bandwidth_hz));
  items.emplace_back("band.alpha", fmt(cfg.path_loss_exp));
  items.emplace_back("band.n0", fmt(cfg.noise_density));
  items.emplace_back("band.c", fmt(cfg.light_speed));
  items.emplace_back("antennas.g_t_ml", fmt(cfg.g_t_ml));
  items.emplace_back("antennas.g_t_sl", fmt(cfg.g_t_sl));
  items.emplace_back("antennas.omega_th", fmt(cfg.omega_th) + "rad");
  items.emplace_back("antennas.g_r_max", fmt(cfg.g_r_max));
  items.emplace_back("antennas.omega_e", fmt(cfg.omega_e_deg) + "deg");
  if (cfg.eirp_density) {
    items.emplace_back("link.eirp_density", fmt(*cfg.eirp_density));
  } else if (cfg.tx_power) {
    items.emplace_back("link.tx_power", fmt(*cfg.tx_power));
  }
  items.emplace_back("link.rain_g", fmt(cfg.rain_g));
  if (cfg.fading_explicit) {
    items.emplace_back("fading.b", fmt(cfg.fading_explicit->b));
    items.emplace_back("fading.m", fmt(cfg.fading_explicit->m));
    items.emplace_back("fading.omega", fmt(cfg.fading_explicit->omega));
  } else {
    items.emplace_back("fading.preset", cfg.fading_name);
  }
  return items;
}

earth_geometry to_geometry(const system_config& cfg) {
  earth_geometry g;
  g.r_e = cfg.earth_radius_m;
  g.a = cfg.altitude_m;
  return g;
}

double resolved_tx_power(const system_config& cfg) {
  if (cfg.tx_power) return *cfg.tx_power;
  return *cfg.eirp_density * cfg.bandwidth_hz / cfg.g_t_ml;
}

double resolved_rx_gain(const system_config& cfg) {
  if (cfg.terminal == terminal_kind::vsat) {
    return vsat_rx_gain(cfg.omega_e_deg, cfg.g_r_max);
  }
  return cfg.g_r_max;
}

link_budget to_budget(const system_config& cfg) {
  link_budget lb;
  lb.tx_power = resolved_tx_power(cfg);
  lb.g_t_ml = cfg.g_t_ml;
  lb.g_t_sl = cfg.g_t_sl;
  lb.g_r = resolved_rx_gain(cfg);
  lb.rain_g = cfg.rain_g;
  lb.f_c = cfg.carrier_hz;
  lb.bandwidth = cfg.bandwidth_hz;
  lb.alpha = cfg.path_loss_exp;
  lb.noise_density = cfg.noise_density;
  lb.light_speed = cfg.light_speed;
  return lb;
}

shadowed_rician_params to_fading(const system_config& cfg) {
  return resolved_fading(cfg);
}

link_scene to_scene(const system_config& cfg) {
  link_scene sc;
  sc.earth = to_geometry(cfg);
  sc.theta_min = cfg.theta_min;
  sc.omega_th = cfg.omega_th;
  sc.sat_count = cfg.sat_count;
  sc.fading = to_fading(cfg);
  sc.budget = to_budget(cfg);
  return sc;
}

}  // namespace leo
