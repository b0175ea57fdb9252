// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chemotx/channel.hpp"
#include "chemotx/errors.hpp"
#include "chemotx/montecarlo.hpp"
#include "chemotx/physics.hpp"
#include "chemotx/statistics.hpp"
#include "chemotx/table.hpp"

namespace chemotx {

/// Configuration file could not be read.
class ConfigIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Resolved run configuration. On disk this is a sectioned key=value file
 * ([physics], [link], [experiment], [output]) whose key names carry their SI
 * units; see configs/default.ini.
 */
struct RunConfig {
  PhysicalParams physics;

  double distance_m = 50e-6;
  double symbol_duration_s = 1.0;
  std::optional<double> sigma_m;
  std::optional<double> snr_ref_db = 20.0;
  double reference_intensity = 50.0;
  double on_intensity = 50.0;
  double off_intensity = 0.0;

  std::optional<std::uint64_t> seed;
  std::size_t pdf_trials = 10000;
  std::size_t bep_trials = 100000;
  double time_step_s = 1e-4;
  double intensity_min = 1.0;
  double intensity_max = 200.0;
  std::size_t intensity_points = 60;
  std::vector<double> pdf_intensities{10.0, 40.0, 70.0, 100.0};
  std::vector<double> ks_intensities{10.0, 40.0};
  std::size_t histogram_bins = 60;
  std::vector<double> snr_distances_m{15e-6, 30e-6, 45e-6};
  std::vector<double> viscosities_pa_s{0.9e-3, 1.0e-3, 3.5e-3};
  std::vector<double> sensitivity_distances_m{30e-6, 50e-6, 70e-6};
  std::vector<double> sensitivity_durations_s{1.0, 10.0};
  std::vector<double> gap_distances_m{30e-6, 50e-6, 70e-6};
  std::vector<double> gap_durations_s{0.5, 1.0, 2.0};
  std::optional<double> bep_intensity;
  bool reflective_wall = true;
  unsigned threads = 0;

  std::string output_directory = "out";
  int precision = 10;

  /// Checks cross-field invariants not covered by the per-key parsers.
  void validate() const {
    physics.validate();
    if (sigma_m.has_value() == snr_ref_db.has_value()) {
      throw ParameterError("link.sigma_m|link.snr_ref_db",
                           sigma_m ? "set only one of link.sigma_m and link.snr_ref_db"
                                   : "one of link.sigma_m or link.snr_ref_db is required");
    }
    detail::require_positive(distance_m, "link.distance_m");
    detail::require_positive(symbol_duration_s, "link.symbol_duration_s");
    if (sigma_m) detail::require_positive(*sigma_m, "link.sigma_m");
    detail::require_positive(reference_intensity, "link.reference_intensity");
    detail::require_nonnegative(off_intensity, "link.off_intensity");
    if (!(on_intensity > off_intensity)) {
      throw ParameterError("link.on_intensity", "must exceed link.off_intensity");
    }
    detail::require_positive(time_step_s, "experiment.time_step_s");
    detail::require_positive(intensity_min, "experiment.intensity_min");
    if (!(intensity_max > intensity_min)) {
      throw ParameterError("experiment.intensity_max", "must exceed experiment.intensity_min");
    }
    if (intensity_points < 2) throw ParameterError("experiment.intensity_points", "must be >= 2");
    if (precision < 1 || precision > 17) throw ParameterError("output.precision", "must lie in [1, 17]");
  }

  [[nodiscard]] LinkConfig link(const DerivedCoefficients& c) const {
    LinkConfig l;
    l.d = distance_m;
    l.T = symbol_duration_s;
    l.I0 = off_intensity;
    l.I1 = on_intensity;
    l.sigma_m = sigma_m ? *sigma_m : calibrate_sigma_m(c, distance_m, reference_intensity, *snr_ref_db);
    l.validate();
    return l;
  }

  [[nodiscard]] ExperimentSpec experiment(ExperimentKind kind, std::uint64_t run_seed) const {
    const DerivedCoefficients c = derive_coefficients(physics);
    ExperimentSpec s;
    s.kind = kind;
    s.physics = physics;
    s.link = link(c);
    s.intensity_grid = stats::geomspace(intensity_min, intensity_max, intensity_points);
    s.n_trials = kind == ExperimentKind::empirical_bep ? bep_trials : pdf_trials;
    s.seed = run_seed;
    s.threads = threads;
    s.dt = time_step_s;
    s.reflective_wall = reflective_wall;
    s.pdf_intensities = pdf_intensities;
    s.ks_intensities = ks_intensities;
    s.histogram_bins = histogram_bins;
    s.snr_distances = snr_distances_m;
    s.viscosities = viscosities_pa_s;
    s.sensitivity_distances = sensitivity_distances_m;
    s.sensitivity_durations = sensitivity_durations_s;
    s.gap_distances = gap_distances_m;
    s.gap_durations = gap_durations_s;
    s.bep_intensity = bep_intensity;
    return s;
  }

  /// One "section.key=value" line per result-affecting field, in a fixed order.
  [[nodiscard]] std::string canonical() const;

  /// FNV-1a 64 of canonical().
  [[nodiscard]] std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

namespace config_detail {

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(d)) throw std::invalid_argument("not finite");
    return d;
  } catch (const std::exception&) {
    throw ParameterError(key, "expected a finite number, got '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return u;
  } catch (const std::exception&) {
    throw ParameterError(key, "expected a non-negative integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError(key, "expected true or false, got '" + v + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ParameterError(key, "expected a comma-separated list of numbers");
  return out;
}

inline std::string fmt(double v) { return format_number(v, 17); }

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

struct Field {
  const char* path;
  std::function<void(RunConfig&, const std::string&)> set;  // empty value = unset
  std::function<std::string(const RunConfig&)> get;
};

inline std::function<void(RunConfig&, const std::string&)> required(
    const char* path, std::function<void(RunConfig&, const std::string&)> f) {
  return [path, f](RunConfig& c, const std::string& v) {
    if (v.empty()) throw ParameterError(path, "value required");
    f(c, v);
  };
}

#define CHEMOTX_DOUBLE(PATH, MEMBER)                                                          \
  Field {                                                                                     \
    PATH, required(PATH, [](RunConfig& c, const std::string& v) { c.MEMBER = parse_double(PATH, v); }), \
        [](const RunConfig& c) { return fmt(c.MEMBER); }                                      \
  }
#define CHEMOTX_OPT_DOUBLE(PATH, MEMBER)                                                      \
  Field {                                                                                     \
    PATH,                                                                                     \
        [](RunConfig& c, const std::string& v) {                                              \
          if (v.empty()) c.MEMBER.reset();                                                    \
          else c.MEMBER = parse_double(PATH, v);                                              \
        },                                                                                    \
        [](const RunConfig& c) { return c.MEMBER ? fmt(*c.MEMBER) : std::string(); }          \
  }
#define CHEMOTX_COUNT(PATH, MEMBER)                                                           \
  Field {                                                                                     \
    PATH,                                                                                     \
        required(PATH,                                                                        \
                 [](RunConfig& c, const std::string& v) {                                     \
                   c.MEMBER = static_cast<decltype(c.MEMBER)>(parse_u64(PATH, v));            \
                 }),                                                                          \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }                           \
  }
#define CHEMOTX_LIST(PATH, MEMBER)                                                            \
  Field {                                                                                     \
    PATH, required(PATH, [](RunConfig& c, const std::string& v) { c.MEMBER = parse_list(PATH, v); }), \
        [](const RunConfig& c) { return fmt_list(c.MEMBER); }                                 \
  }

inline const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      CHEMOTX_DOUBLE("physics.radius_m", physics.a),
      CHEMOTX_DOUBLE("physics.viscosity_pa_s", physics.eta),
      CHEMOTX_DOUBLE("physics.temperature_k", physics.T_env),
      CHEMOTX_DOUBLE("physics.cap_half_angle_rad", physics.alpha),
      CHEMOTX_DOUBLE("physics.surface_flux_per_m2_s", physics.kappa_base),
      CHEMOTX_DOUBLE("physics.phoretic_mobility_m5_per_s", physics.b_dp),
      CHEMOTX_DOUBLE("physics.fuel_diffusivity_m2_per_s", physics.D_fuel),
      CHEMOTX_DOUBLE("physics.signal_diffusivity_m2_per_s", physics.D_B),
      CHEMOTX_DOUBLE("physics.receiver_gain", physics.beta_R),
      CHEMOTX_DOUBLE("link.distance_m", distance_m),
      CHEMOTX_DOUBLE("link.symbol_duration_s", symbol_duration_s),
      CHEMOTX_OPT_DOUBLE("link.sigma_m", sigma_m),
      CHEMOTX_OPT_DOUBLE("link.snr_ref_db", snr_ref_db),
      CHEMOTX_DOUBLE("link.reference_intensity", reference_intensity),
      CHEMOTX_DOUBLE("link.on_intensity", on_intensity),
      CHEMOTX_DOUBLE("link.off_intensity", off_intensity),
      Field{"experiment.seed",
            [](RunConfig& c, const std::string& v) {
              if (v.empty()) c.seed.reset();
              else c.seed = parse_u64("experiment.seed", v);
            },
            [](const RunConfig&) { return std::string(); }},
      CHEMOTX_COUNT("experiment.pdf_trials", pdf_trials),
      CHEMOTX_COUNT("experiment.bep_trials", bep_trials),
      CHEMOTX_DOUBLE("experiment.time_step_s", time_step_s),
      CHEMOTX_DOUBLE("experiment.intensity_min", intensity_min),
      CHEMOTX_DOUBLE("experiment.intensity_max", intensity_max),
      CHEMOTX_COUNT("experiment.intensity_points", intensity_points),
      CHEMOTX_LIST("experiment.pdf_intensities", pdf_intensities),
      CHEMOTX_LIST("experiment.ks_intensities", ks_intensities),
      CHEMOTX_COUNT("experiment.histogram_bins", histogram_bins),
      CHEMOTX_LIST("experiment.snr_distances_m", snr_distances_m),
      CHEMOTX_LIST("experiment.viscosities_pa_s", viscosities_pa_s),
      CHEMOTX_LIST("experiment.sensitivity_distances_m", sensitivity_distances_m),
      CHEMOTX_LIST("experiment.sensitivity_durations_s", sensitivity_durations_s),
      CHEMOTX_LIST("experiment.gap_distances_m", gap_distances_m),
      CHEMOTX_LIST("experiment.gap_durations_s", gap_durations_s),
      CHEMOTX_OPT_DOUBLE("experiment.bep_intensity", bep_intensity),
      Field{"experiment.reflective_wall",
            required("experiment.reflective_wall",
                     [](RunConfig& c, const std::string& v) {
                       c.reflective_wall = parse_bool("experiment.reflective_wall", v);
                     }),
            [](const RunConfig& c) { return std::string(c.reflective_wall ? "true" : "false"); }},
      CHEMOTX_COUNT("experiment.threads", threads),
      Field{"output.directory",
            required("output.directory", [](RunConfig& c, const std::string& v) { c.output_directory = v; }),
            [](const RunConfig& c) { return c.output_directory; }},
      CHEMOTX_COUNT("output.precision", precision),
  };
  return f;
}

#undef CHEMOTX_DOUBLE
#undef CHEMOTX_OPT_DOUBLE
#undef CHEMOTX_COUNT
#undef CHEMOTX_LIST

/// Settings that cannot change any output value (seed is recorded separately).
inline bool affects_results(std::string_view path) {
  return path != "experiment.seed" && path != "experiment.threads" && path != "output.directory";
}

inline const Field* find_field(const std::string& path) {
  for (const auto& f : fields()) {
    if (path == f.path) return &f;
  }
  return nullptr;
}

}  // namespace config_detail

inline std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& f : config_detail::fields()) {
    if (!config_detail::affects_results(f.path)) continue;
    out += f.path;
    out += '=';
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

/// Applies one "section.key=value" assignment. An empty value unsets optional keys.
inline void apply_setting(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ParameterError(assignment, "expected section.key=value");
  }
  const std::string key = config_detail::trim(assignment.substr(0, eq));
  const std::string value = config_detail::trim(assignment.substr(eq + 1));
  const auto* field = config_detail::find_field(key);
  if (!field) throw ParameterError(key, "unknown configuration key");
  field->set(cfg, value);
}

/**
 * Parses configuration text. Keys absent from the text keep their built-in
 * defaults, except that link.sigma_m / link.snr_ref_db must be given
 * explicitly (exactly one of them).
 */
inline RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParameterError("config", std::string("malformed file: ") + e.message() +
                                       " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  cfg.sigma_m.reset();
  cfg.snr_ref_db.reset();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      throw ParameterError(section, "key outside of a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const auto* field = config_detail::find_field(path);
      if (!field) throw ParameterError(path, "unknown configuration key");
      field->set(cfg, config_detail::trim(value.data()));
    }
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace chemotx
