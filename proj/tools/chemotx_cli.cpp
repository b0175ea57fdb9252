// SPDX-License-Identifier: Apache-2.0
//
// chemotx: command-line front end for the transceiver model.
//
//   chemotx derive      [--config f] [--set k=v]...
//   chemotx design      ...
//   chemotx stats       --intensity I ...
//   chemotx validate    ...
//   chemotx experiment  <kind> [--seed n] [--threads n] [--out dir] ...
//
// Exit codes: 0 success, 1 validation failure, 2 assertion failure, 3 I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "chemotx/chemotx.hpp"

namespace {

using namespace chemotx;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitIo = 3;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  double intensity = -1.0;
  std::string kind;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
  for (const auto& s : o.sets) apply_setting(cfg, s);
  if (o.threads) cfg.threads = *o.threads;
  if (o.out_dir) cfg.output_directory = *o.out_dir;
  cfg.validate();
  return cfg;
}

void print_kv(const char* name, double v, const char* unit) {
  std::printf("  %-26s %-16.10g %s\n", name, v, unit);
}

void print_validity(const ValidityReport& r) {
  std::printf("validity:\n");
  std::printf("  %-26s %-16.6g %s\n", "sigma_x/d (<= 0.1)", r.ratio_sigma_x_over_d,
              r.linearization_ok ? "ok" : "VIOLATED");
  std::printf("  %-26s %-16.6g %s\n", "Peclet U d/D_B (<= 0.1)", r.peclet, r.peclet_ok ? "ok" : "VIOLATED");
  std::printf("  %-26s %-16.6g %s\n", "T D_B/d^2 (>= 1)", r.quasi_steady_margin,
              r.quasi_steady_ok ? "ok" : "marginal");
}

void print_csv(const Table& t) {
  write_csv(std::cout, t, Provenance{t.name, 0, 0}, 10);
}

int cmd_derive(const RunConfig& cfg) {
  const DerivedCoefficients c = derive_coefficients(cfg.physics);
  const LinkConfig link = cfg.link(c);
  std::printf("derived coefficients:\n");
  print_kv("D_t", c.D_t, "m^2/s");
  print_kv("D_r", c.D_r, "1/s");
  print_kv("tau_r", c.tau_r, "s");
  print_kv("A_cap", c.A_cap, "m^2");
  print_kv("K_control", c.K_control, "m/s per unit intensity");
  print_kv("kappa_em", c.kappa_em, "molecules/s per unit intensity");
  print_kv("G_ch", c.G_ch, "molecules/m per unit intensity");
  print_kv("H0", c.H0, "obs m per unit intensity");
  print_kv("sigma_m", link.sigma_m, "obs");
  print_kv("U at on_intensity", std::abs(propulsion_speed(c, link.I1)), "m/s");
  if (c.K_control == 0.0) {
    std::fprintf(stderr, "warning: K_control = 0, propulsion is disabled\n");
  }
  const ValidityReport v = validity_report(c, link, link.I1);
  print_validity(v);
  std::printf("\n");
  Table t{"derive",
          {"D_t", "D_r", "tau_r", "A_cap", "K_control", "kappa_em", "G_ch", "H0", "sigma_m",
           "sigma_x_over_d", "peclet", "quasi_steady_margin", "valid_flags"},
          {}};
  t.add_row({c.D_t, c.D_r, c.tau_r, c.A_cap, c.K_control, c.kappa_em, c.G_ch, c.H0, link.sigma_m,
             v.ratio_sigma_x_over_d, v.peclet, v.quasi_steady_margin, v.flags()});
  print_csv(t);
  return kExitOk;
}

int cmd_design(const RunConfig& cfg) {
  const DerivedCoefficients c = derive_coefficients(cfg.physics);
  const LinkConfig link = cfg.link(c);
  const double i_opt = optimal_intensity(c, link);
  const LinkPerformance p = ook_link_performance(c, link, i_opt, MobilityModel::proposed);
  std::printf("design rule:\n");
  print_kv("I_opt", i_opt, "");
  print_kv("U(I_opt)", std::abs(propulsion_speed(c, i_opt)), "m/s");
  print_kv("SNR(I_opt)", p.snr, "");
  print_kv("SNR(I_opt)", 10.0 * std::log10(p.snr), "dB");
  print_kv("gamma", p.detector.gamma, "obs");
  print_kv("BEP(I_opt)", p.bep, "");
  std::printf("actuation envelope: 0 < I <= %.10g\n", i_opt);
  print_validity(p.validity);
  std::printf("\n");
  Table t{"design", {"I_opt", "snr", "snr_db", "gamma", "bep", "valid_flags"}, {}};
  t.add_row({i_opt, p.snr, 10.0 * std::log10(p.snr), p.detector.gamma, p.bep, p.validity.flags()});
  print_csv(t);
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, double I) {
  const DerivedCoefficients c = derive_coefficients(cfg.physics);
  const LinkConfig link = cfg.link(c);
  Table t{"stats", {"model", "I", "mu", "sigma_x_sq", "sigma_Y_sq", "alpha_b", "snr"}, {}};
  for (auto model : {MobilityModel::proposed, MobilityModel::baseline}) {
    const ChannelStatistics s = model_stats(c, link, I, model);
    t.add_row({std::string(to_string(model)), I, s.mu, s.sigma_x_sq, s.sigma_Y_sq, s.alpha_b,
               s.sigma_Y_sq > 0.0 ? s.mu * s.mu / s.sigma_Y_sq : 0.0});
  }
  print_validity(validity_report(c, link, I));
  std::printf("\n");
  print_csv(t);
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  const DerivedCoefficients c = derive_coefficients(cfg.physics);
  const LinkConfig link = cfg.link(c);
  std::printf("configuration ok (hash %s)\n", hex64(cfg.hash()).c_str());
  print_validity(validity_report(c, link, link.I1));
  return kExitOk;
}

int cmd_experiment(const RunConfig& cfg, const Options& o) {
  const auto kind = parse_experiment_kind(o.kind);
  if (!kind) throw ParameterError("kind", "unknown experiment kind '" + o.kind + "'");
  std::uint64_t seed;
  if (o.seed) {
    seed = *o.seed;
  } else if (cfg.seed) {
    seed = *cfg.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::fprintf(stderr, "no seed given; drew %llu (recorded in the CSV headers)\n",
                 static_cast<unsigned long long>(seed));
  }
  const ExperimentSpec spec = cfg.experiment(*kind, seed);

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());

  const ExperimentOutput out = run_experiment(spec);
  const Provenance prov{to_string(*kind), cfg.hash(), seed};
  auto emit = [&](const Table& t) {
    const fs::path file = dir / (t.name + ".csv");
    std::ofstream f(file, std::ios::binary);
    if (!f) throw OutputError("cannot write " + file.string());
    write_csv(f, t, prov, cfg.precision);
    if (!f) throw OutputError("write failed: " + file.string());
    std::printf("wrote %s\n", file.string().c_str());
  };
  for (const auto& t : out.tables) emit(t);
  Table checks = checks_table(out.checks);
  checks.name = std::string(to_string(*kind)) + "_checks";
  emit(checks);

  for (const auto& c : out.checks) {
    std::printf("%s %s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  return out.ok() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemo-hydrodynamic transceiver model: design rules, channel statistics and "
               "Monte Carlo experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "configuration file (sectioned key=value)");
    sub->add_option("--set", o.sets, "override, e.g. --set link.distance_m=30e-6 (repeatable)");
    sub->add_option("--threads", o.threads, "worker cap (0 = all cores)");
    sub->add_option("--out", o.out_dir, "output directory for CSV files");
  };

  auto* derive = app.add_subcommand("derive", "print derived coefficients and validity ratios");
  auto* design = app.add_subcommand("design", "closed-form optimal intensity and its BEP");
  auto* stats_cmd = app.add_subcommand("stats", "channel statistics at one intensity");
  auto* validate = app.add_subcommand("validate", "check a configuration");
  auto* experiment = app.add_subcommand("experiment", "run an experiment and write CSV files");
  for (auto* s : {derive, design, stats_cmd, validate, experiment}) add_common(s);
  stats_cmd->add_option("--intensity,-I", o.intensity, "control intensity")->required();
  experiment->add_option("kind", o.kind,
                         "pdf_validation | snr_sweep | bep_sensitivity | estimation_gap | empirical_bep")
      ->required();
  experiment->add_option("--seed", o.seed, "64-bit seed (default: config, else an entropy draw)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    const RunConfig cfg = resolve_config(o);
    if (derive->parsed()) return cmd_derive(cfg);
    if (design->parsed()) return cmd_design(cfg);
    if (stats_cmd->parsed()) return cmd_stats(cfg, o.intensity);
    if (validate->parsed()) return cmd_validate(cfg);
    if (experiment->parsed()) return cmd_experiment(cfg, o);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const UnboundedOptimumError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const DetectionError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const ConfigIoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const OutputError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  }
  return kExitValidation;
}
