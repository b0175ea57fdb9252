// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemotx/channel.hpp"
#include "chemotx/detection.hpp"
#include "chemotx/errors.hpp"
#include "chemotx/mobility.hpp"
#include "chemotx/physics.hpp"
#include "chemotx/random.hpp"
#include "chemotx/statistics.hpp"
#include "chemotx/table.hpp"

namespace chemotx {

enum class ExperimentKind { pdf_validation, snr_sweep, bep_sensitivity, estimation_gap, empirical_bep };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::pdf_validation: return "pdf_validation";
    case ExperimentKind::snr_sweep: return "snr_sweep";
    case ExperimentKind::bep_sensitivity: return "bep_sensitivity";
    case ExperimentKind::estimation_gap: return "estimation_gap";
    case ExperimentKind::empirical_bep: return "empirical_bep";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::pdf_validation, ExperimentKind::snr_sweep,
                 ExperimentKind::bep_sensitivity, ExperimentKind::estimation_gap,
                 ExperimentKind::empirical_bep}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/**
 * Everything an experiment needs. `link.sigma_m` is already resolved and is
 * held fixed (in absolute observation units) across every sweep.
 */
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::pdf_validation;
  PhysicalParams physics;
  LinkConfig link;

  std::vector<double> intensity_grid = stats::geomspace(1.0, 200.0, 60);
  std::size_t n_trials = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double dt = 1e-4;
  bool reflective_wall = true;

  // pdf_validation
  std::vector<double> pdf_intensities{10.0, 40.0, 70.0, 100.0};
  std::vector<double> ks_intensities{10.0, 40.0};
  std::size_t histogram_bins = 60;

  // snr_sweep
  std::vector<double> snr_distances{15e-6, 30e-6, 45e-6};

  // bep_sensitivity
  std::vector<double> viscosities{0.9e-3, 1.0e-3, 3.5e-3};
  std::vector<double> sensitivity_distances{30e-6, 50e-6, 70e-6};
  std::vector<double> sensitivity_durations{1.0, 10.0};

  // estimation_gap
  std::vector<double> gap_distances{30e-6, 50e-6, 70e-6};
  std::vector<double> gap_durations{0.5, 1.0, 2.0};

  // empirical_bep; unset means the closed-form optimum
  std::optional<double> bep_intensity;

  void validate() const {
    physics.validate();
    link.validate();
    check_grid(intensity_grid, "intensity_grid");
    if (intensity_grid.front() <= 0.0) throw ParameterError("intensity_grid", "values must be > 0");
    detail::require_positive(dt, "dt");
    switch (kind) {
      case ExperimentKind::pdf_validation:
        check_grid(pdf_intensities, "pdf_intensities");
        if (n_trials < 2) throw ParameterError("n_trials", "must be >= 2");
        if (histogram_bins == 0) throw ParameterError("histogram_bins", "must be >= 1");
        break;
      case ExperimentKind::snr_sweep:
        check_grid(snr_distances, "snr_distances");
        break;
      case ExperimentKind::bep_sensitivity:
        check_grid(viscosities, "viscosities");
        check_grid(sensitivity_distances, "sensitivity_distances");
        check_grid(sensitivity_durations, "sensitivity_durations");
        break;
      case ExperimentKind::estimation_gap:
        check_grid(gap_distances, "gap_distances");
        check_grid(gap_durations, "gap_durations");
        break;
      case ExperimentKind::empirical_bep:
        if (n_trials < 1000) throw ParameterError("n_trials", "BEP estimation needs >= 1000 trials");
        break;
    }
  }

 private:
  static void check_grid(const std::vector<double>& g, const char* field) {
    if (g.empty()) throw ParameterError(field, "must be nonempty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      detail::require_finite(g[i], field);
      if (i > 0 && !(g[i] > g[i - 1])) throw ParameterError(field, "must be strictly increasing");
    }
  }
};

/// Tables plus assertion outcomes of one experiment run.
struct ExperimentOutput {
  std::vector<Table> tables;
  std::vector<Check> checks;
  [[nodiscard]] bool ok() const { return all_passed(checks); }
};

namespace detail {

inline IntegratorConfig symbol_integrator(const ExperimentSpec& spec, const LinkConfig& link,
                                          std::uint64_t seed) {
  IntegratorConfig cfg = IntegratorConfig::for_duration(link.T, spec.dt, seed);
  // particle surface touching the receiver plane
  if (spec.reflective_wall) cfg.wall_position = link.d - spec.physics.a;
  return cfg;
}

inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

inline std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

inline std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Largest spacing between grid[i] and its neighbours.
inline double local_step(const std::vector<double>& grid, std::size_t i) {
  double step = 0.0;
  if (i > 0) step = std::max(step, grid[i] - grid[i - 1]);
  if (i + 1 < grid.size()) step = std::max(step, grid[i + 1] - grid[i]);
  return step;
}

inline bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

/// Minimum strictly inside the grid (so the curve falls and then rises).
inline bool has_interior_minimum(const std::vector<double>& v) {
  const std::size_t i = argmin(v);
  return i > 0 && i + 1 < v.size() && v.back() > v[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PDF validation

struct PdfCurve {
  double intensity = 0.0;
  ChannelStatistics analytic;
  stats::Moments empirical;
  double ks = 0.0;
  double ks_critical = 0.0;
  bool ks_asserted = false;
  stats::Histogram histogram;
  std::vector<double> analytic_density;
  ValidityReport validity;
};

struct PdfValidationResult {
  std::vector<PdfCurve> curves;
  std::vector<Check> checks;
};

/**
 * Received observations of the ON symbol at each intensity, simulated through
 * the Langevin integrator and the exact nonlinear observation, compared
 * against N(mu_1, sigma_Y^2). Trial k uses the stream sub_seed(seed, k) at
 * every intensity, so curves share common random numbers.
 */
inline PdfValidationResult run_pdf_validation(const ExperimentSpec& spec) {
  spec.validate();
  const DerivedCoefficients coef = derive_coefficients(spec.physics);
  const LinkConfig& link = spec.link;
  PdfValidationResult res;

  std::vector<std::vector<double>> samples;
  for (double I : spec.pdf_intensities) {
    const MobilityParams mob = MobilityParams::from(coef, I, link.T);
    const IntegratorConfig cfg = detail::symbol_integrator(spec, link, spec.seed);
    mob.validate();
    cfg.validate(mob);
    std::vector<double> ys(spec.n_trials);
    parallel_for_index(spec.n_trials, spec.threads, [&](std::size_t k) {
      Xoshiro256 eng(sub_seed(spec.seed, k));
      NormalSampler normal;
      const double x = integrate_axial(mob, cfg, eng, normal);
      const double z = link.sigma_m * normal(eng);
      ys[k] = observe_nonlinear(coef, link, I, x, z);
    });

    PdfCurve c;
    c.intensity = I;
    c.analytic = channel_stats(coef, link, mob, I);
    c.empirical = stats::moments(ys);
    c.ks = stats::ks_distance_normal(ys, c.analytic.mu, std::sqrt(c.analytic.sigma_Y_sq));
    c.ks_critical = stats::ks_critical_1pct(ys.size());
    c.ks_asserted = std::find(spec.ks_intensities.begin(), spec.ks_intensities.end(), I) !=
                    spec.ks_intensities.end();
    c.validity = validity_report(coef, link, I);
    res.curves.push_back(std::move(c));
    samples.push_back(std::move(ys));
  }

  // shared support: +-5 analytic standard deviations around every curve
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : res.curves) {
    const double s = std::sqrt(c.analytic.sigma_Y_sq);
    lo = std::min(lo, c.analytic.mu - 5.0 * s);
    hi = std::max(hi, c.analytic.mu + 5.0 * s);
  }
  for (std::size_t i = 0; i < res.curves.size(); ++i) {
    auto& c = res.curves[i];
    c.histogram = stats::density_histogram(samples[i], lo, hi, spec.histogram_bins);
    const double s = std::sqrt(c.analytic.sigma_Y_sq);
    for (std::size_t b = 0; b < spec.histogram_bins; ++b) {
      const double z = (c.histogram.centre(b) - c.analytic.mu) / s;
      c.analytic_density.push_back(std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi)));
    }
  }

  for (const auto& c : res.curves) {
    if (!c.ks_asserted) continue;
    res.checks.push_back({strfmt("ks_below_1pct_critical_I%g", c.intensity), c.ks < c.ks_critical,
                          strfmt("ks=%.5g critical=%.5g", c.ks, c.ks_critical)});
  }
  bool increasing = true;
  std::string detail_s = "var:";
  for (std::size_t i = 0; i < res.curves.size(); ++i) {
    detail_s += strfmt(" %.6g", res.curves[i].empirical.variance);
    if (i > 0 && !(res.curves[i].empirical.variance > res.curves[i - 1].empirical.variance)) {
      increasing = false;
    }
  }
  res.checks.push_back({"empirical_variance_increasing_in_I", increasing, detail_s});
  return res;
}

inline ExperimentOutput to_output(const PdfValidationResult& r) {
  ExperimentOutput out;
  Table summary{"pdf_summary",
                {"I", "mu", "sigma_Y_sq", "empirical_mean", "empirical_var", "empirical_var_se", "ks",
                 "ks_critical_1pct", "ks_asserted", "sigma_x_over_d", "valid_flags"},
                {}};
  for (const auto& c : r.curves) {
    summary.add_row({c.intensity, c.analytic.mu, c.analytic.sigma_Y_sq, c.empirical.mean,
                     c.empirical.variance, c.empirical.variance_se, c.ks, c.ks_critical,
                     std::int64_t{c.ks_asserted ? 1 : 0}, c.validity.ratio_sigma_x_over_d,
                     c.validity.flags()});
  }
  out.tables.push_back(std::move(summary));
  for (const auto& c : r.curves) {
    Table t{strfmt("pdf_I%g", c.intensity), {"y", "empirical_density", "analytical_density", "valid_flags"}, {}};
    for (std::size_t b = 0; b < c.analytic_density.size(); ++b) {
      t.add_row({c.histogram.centre(b), c.histogram.density[b], c.analytic_density[b], c.validity.flags()});
    }
    out.tables.push_back(std::move(t));
  }
  out.checks = r.checks;
  return out;
}

// ---------------------------------------------------------------------------
// Empirical BEP

/// Which mobility drives the simulated transmitter.
enum class SimulatedMobility { active, passive };

struct EmpiricalBep {
  double intensity = 0.0;
  std::size_t n = 0;
  std::size_t errors = 0;
  double p_empirical = 0.0;
  stats::Interval wilson;
  double p_analytic = 0.0;  ///< BEP predicted for the simulated mobility with the detector used
  DetectorSpec detector;
  ValidityReport validity;
  SimulatedMobility mobility = SimulatedMobility::active;

  [[nodiscard]] bool analytic_inside() const { return wilson.contains(p_analytic); }
};

/**
 * Equiprobable OOK symbols pushed through the full physical path and detected
 * with the analytical ML threshold of the proposed model. With
 * SimulatedMobility::passive the simulator runs with U = 0 (keeping the
 * proposed threshold), and the prediction uses baseline variances instead.
 */
inline EmpiricalBep run_empirical_bep(const ExperimentSpec& spec, double I,
                                      SimulatedMobility mobility = SimulatedMobility::active) {
  spec.validate();
  if (spec.n_trials < 1000) throw ParameterError("n_trials", "BEP estimation needs >= 1000 trials");
  detail::require_intensity(I);
  if (!(I > 0.0)) throw ParameterError("intensity", "both symbols at I = 0 are not separable");
  const DerivedCoefficients coef = derive_coefficients(spec.physics);
  const LinkConfig& link = spec.link;

  EmpiricalBep r;
  r.intensity = I;
  r.mobility = mobility;
  r.detector = ook_link_performance(coef, link, I, MobilityModel::proposed).detector;
  r.validity = validity_report(coef, link, I);
  {
    DetectorSpec predicted = r.detector;
    if (mobility == SimulatedMobility::passive) {
      predicted.sigma1 = std::sqrt(baseline_stats(coef, link, I).sigma_Y_sq);
    }
    r.p_analytic = bep(predicted);
  }

  MobilityParams mob = MobilityParams::from(coef, I, link.T);
  if (mobility == SimulatedMobility::passive) mob.U = 0.0;
  const IntegratorConfig cfg = detail::symbol_integrator(spec, link, spec.seed);
  mob.validate();
  cfg.validate(mob);

  std::vector<std::uint8_t> wrong(spec.n_trials, 0);
  parallel_for_index(spec.n_trials, spec.threads, [&](std::size_t k) {
    Xoshiro256 eng(sub_seed(spec.seed, k));
    NormalSampler normal;
    const bool bit = (eng() >> 63) != 0;
    double y;
    if (bit) {
      const double x = integrate_axial(mob, cfg, eng, normal);
      y = observe_nonlinear(coef, link, I, x, link.sigma_m * normal(eng));
    } else {
      // OFF symbol emits nothing: H0 * 0 / (d - x) = 0 for every position
      y = link.sigma_m * normal(eng);
    }
    wrong[k] = r.detector.decide(y) != bit ? 1 : 0;
  });
  r.n = spec.n_trials;
  for (auto w : wrong) r.errors += w;
  r.p_empirical = static_cast<double>(r.errors) / static_cast<double>(r.n);
  r.wilson = stats::wilson_interval(r.errors, r.n);
  return r;
}

inline ExperimentOutput to_output(const EmpiricalBep& r) {
  ExperimentOutput out;
  Table t{"empirical_bep",
          {"I", "mobility", "n", "errors", "bep_empirical", "wilson_lo", "wilson_hi", "bep_analytic",
           "gamma", "monte_carlo_floor", "valid_flags"},
          {}};
  // with zero observed errors the interval upper edge is the resolvable floor
  const double floor = stats::wilson_interval(0, r.n).hi;
  t.add_row({r.intensity, std::string(r.mobility == SimulatedMobility::active ? "active" : "passive"),
             static_cast<std::int64_t>(r.n), static_cast<std::int64_t>(r.errors), r.p_empirical,
             r.wilson.lo, r.wilson.hi, r.p_analytic, r.detector.gamma, floor, r.validity.flags()});
  out.tables.push_back(std::move(t));
  out.checks.push_back({"analytic_bep_inside_wilson95", r.analytic_inside(),
                        strfmt("analytic=%.4g interval=[%.4g, %.4g] errors=%zu/%zu", r.p_analytic,
                               r.wilson.lo, r.wilson.hi, r.errors, r.n)});
  return out;
}

// ---------------------------------------------------------------------------
// SNR sweep over link distance

struct SnrCurve {
  double d = 0.0;
  std::vector<double> snr;
  double i_opt_closed = 0.0;
  double i_opt_grid = 0.0;
  double peak_snr = 0.0;  ///< SNR at the closed-form optimum
  std::vector<std::string> flags;
};

struct SnrSweepResult {
  std::vector<double> grid;
  std::vector<SnrCurve> curves;
  stats::LinearFit fit;  ///< I_opt (closed form) against d
  std::vector<Check> checks;
};

inline SnrSweepResult run_snr_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const DerivedCoefficients coef = derive_coefficients(spec.physics);
  SnrSweepResult res;
  res.grid = spec.intensity_grid;
  for (double d : spec.snr_distances) {
    LinkConfig link = spec.link;
    link.d = d;
    SnrCurve c;
    c.d = d;
    for (double I : res.grid) {
      c.snr.push_back(snr(coef, link, I));
      c.flags.push_back(validity_report(coef, link, I).flags());
    }
    c.i_opt_closed = optimal_intensity(coef, link);
    c.i_opt_grid = res.grid[detail::argmax(c.snr)];
    c.peak_snr = snr(coef, link, c.i_opt_closed);
    res.curves.push_back(std::move(c));
  }

  std::vector<double> ds, iopts;
  double peak_lo = std::numeric_limits<double>::infinity(), peak_hi = 0.0;
  for (const auto& c : res.curves) {
    const std::size_t i = detail::argmax(c.snr);
    const double step = detail::local_step(res.grid, i);
    res.checks.push_back({strfmt("grid_argmax_within_one_step_d%gum", c.d * 1e6),
                          std::abs(c.i_opt_grid - c.i_opt_closed) <= step,
                          strfmt("grid=%.6g closed=%.6g step=%.4g", c.i_opt_grid, c.i_opt_closed, step)});
    const std::size_t maxima = stats::count_local_maxima(c.snr);
    res.checks.push_back({strfmt("snr_unimodal_d%gum", c.d * 1e6), maxima == 1,
                          strfmt("interior local maxima=%zu", maxima)});
    ds.push_back(c.d);
    iopts.push_back(c.i_opt_closed);
    peak_lo = std::min(peak_lo, c.peak_snr);
    peak_hi = std::max(peak_hi, c.peak_snr);
  }
  if (res.curves.size() >= 2) {
    res.fit = stats::linear_fit(ds, iopts);
    res.checks.push_back({"i_opt_linear_in_d_r2", res.fit.r_squared > 0.999,
                          strfmt("R2=%.12g slope=%.6g intercept=%.4g", res.fit.r_squared,
                                 res.fit.slope, res.fit.intercept)});
    double worst = 0.0;
    for (std::size_t i = 1; i < ds.size(); ++i) {
      const double expected = ds[i] / ds[0];
      worst = std::max(worst, std::abs(iopts[i] / iopts[0] - expected) / expected);
    }
    res.checks.push_back({"i_opt_ratio_matches_distance_ratio", worst < 0.01,
                          strfmt("max relative ratio error=%.3g", worst)});
    const double spread_db = 10.0 * std::log10(peak_hi / peak_lo);
    res.checks.push_back({"peak_snr_spread_below_1dB", spread_db < 1.0,
                          strfmt("spread=%.4g dB", spread_db)});
  }
  return res;
}

inline ExperimentOutput to_output(const SnrSweepResult& r) {
  ExperimentOutput out;
  Table t{"snr_sweep", {"d_m", "I", "snr", "snr_db", "i_opt_closed", "i_opt_grid", "valid_flags"}, {}};
  for (const auto& c : r.curves) {
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      t.add_row({c.d, r.grid[i], c.snr[i], 10.0 * std::log10(c.snr[i]), c.i_opt_closed,
                 c.i_opt_grid, c.flags[i]});
    }
  }
  out.tables.push_back(std::move(t));
  out.checks = r.checks;
  return out;
}

// ---------------------------------------------------------------------------
// BEP curves (sensitivity panels and the estimation gap)

struct BepCurve {
  std::string panel;
  double sweep_value = 0.0;
  MobilityModel model = MobilityModel::proposed;
  std::vector<double> bep;
  std::vector<double> snr;
  std::vector<double> gamma;
  std::vector<std::string> flags;
  double i_opt = 0.0;

  [[nodiscard]] double min_bep() const { return *std::min_element(bep.begin(), bep.end()); }
};

namespace detail {

inline BepCurve bep_curve(const DerivedCoefficients& coef, const LinkConfig& link,
                          const std::vector<double>& grid, MobilityModel model, std::string panel,
                          double value) {
  BepCurve c;
  c.panel = std::move(panel);
  c.sweep_value = value;
  c.model = model;
  for (double I : grid) {
    const LinkPerformance p = ook_link_performance(coef, link, I, model);
    c.bep.push_back(p.bep);
    c.snr.push_back(p.snr);
    c.gamma.push_back(p.detector.gamma);
    c.flags.push_back(p.validity.flags());
  }
  c.i_opt = optimal_intensity(coef, link);
  return c;
}

inline Check ordering_check(std::string name, const std::vector<BepCurve>& curves, bool strict_chain) {
  std::string d = "min BEP:";
  for (const auto& c : curves) d += strfmt(" %g->%.4g", c.sweep_value, c.min_bep());
  bool ok = true;
  if (strict_chain) {
    for (std::size_t i = 1; i < curves.size(); ++i) ok = ok && curves[i].min_bep() > curves[i - 1].min_bep();
  } else {
    ok = curves.back().min_bep() > curves.front().min_bep();
  }
  return {std::move(name), ok, d};
}

}  // namespace detail

struct BepSensitivityResult {
  std::vector<double> grid;
  std::vector<BepCurve> curves;
  std::vector<Check> checks;
};

/**
 * BEP(I) of the proposed model across viscosity, distance and symbol
 * duration. Viscosity changes D_t and D_r through Stokes-Einstein; the
 * propulsion gain and sigma_m stay fixed.
 */
inline BepSensitivityResult run_bep_sensitivity(const ExperimentSpec& spec) {
  spec.validate();
  BepSensitivityResult res;
  res.grid = spec.intensity_grid;
  std::vector<BepCurve> eta_curves, d_curves, t_curves;
  for (double eta : spec.viscosities) {
    PhysicalParams p = spec.physics;
    p.eta = eta;
    eta_curves.push_back(detail::bep_curve(derive_coefficients(p), spec.link, res.grid,
                                           MobilityModel::proposed, "eta", eta));
  }
  const DerivedCoefficients coef = derive_coefficients(spec.physics);
  for (double d : spec.sensitivity_distances) {
    LinkConfig link = spec.link;
    link.d = d;
    d_curves.push_back(detail::bep_curve(coef, link, res.grid, MobilityModel::proposed, "d", d));
  }
  for (double T : spec.sensitivity_durations) {
    LinkConfig link = spec.link;
    link.T = T;
    t_curves.push_back(detail::bep_curve(coef, link, res.grid, MobilityModel::proposed, "T", T));
  }
  res.checks.push_back(detail::ordering_check("min_bep_higher_at_highest_viscosity", eta_curves, false));
  res.checks.push_back(detail::ordering_check("min_bep_increasing_in_distance", d_curves, true));
  res.checks.push_back(detail::ordering_check("min_bep_higher_at_longest_symbol", t_curves, false));
  for (auto* group : {&eta_curves, &d_curves, &t_curves}) {
    for (auto& c : *group) res.curves.push_back(std::move(c));
  }
  return res;
}

inline ExperimentOutput bep_curves_output(const std::string& name, const std::vector<double>& grid,
                                          const std::vector<BepCurve>& curves,
                                          const std::vector<Check>& checks) {
  ExperimentOutput out;
  Table t{name, {"panel", "sweep_value", "model", "I", "bep", "snr", "gamma", "i_opt_closed", "valid_flags"}, {}};
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.add_row({c.panel, c.sweep_value, std::string(to_string(c.model)), grid[i], c.bep[i], c.snr[i],
                 c.gamma[i], c.i_opt, c.flags[i]});
    }
  }
  out.tables.push_back(std::move(t));
  out.checks = checks;
  return out;
}

inline ExperimentOutput to_output(const BepSensitivityResult& r) {
  return bep_curves_output("bep_sensitivity", r.grid, r.curves, r.checks);
}

inline constexpr double kGapTargetFloor = 1e-3;  // proposed-model error floor for short links
inline constexpr double kGapBaselineCeiling = 1e-6;
inline constexpr double kConvergenceFactor = 2.0;

struct GapPair {
  std::string panel;
  double sweep_value = 0.0;
  LinkConfig link;
  BepCurve proposed;
  BepCurve baseline;
  std::vector<EstimationGap> gap;
};

struct EstimationGapResult {
  std::vector<double> grid;
  std::vector<GapPair> pairs;
  std::vector<Check> checks;
};

/**
 * Proposed vs. decoupled-Brownian BEP over symbol duration (at the base
 * distance) and over distance (at the base duration).
 */
inline EstimationGapResult run_estimation_gap(const ExperimentSpec& spec) {
  spec.validate();
  const DerivedCoefficients coef = derive_coefficients(spec.physics);
  EstimationGapResult res;
  res.grid = spec.intensity_grid;

  auto make_pair = [&](const std::string& panel, double value, const LinkConfig& link) {
    GapPair g;
    g.panel = panel;
    g.sweep_value = value;
    g.link = link;
    g.proposed = detail::bep_curve(coef, link, res.grid, MobilityModel::proposed, panel, value);
    g.baseline = detail::bep_curve(coef, link, res.grid, MobilityModel::baseline, panel, value);
    for (double I : res.grid) g.gap.push_back(estimation_gap(coef, link, I));
    return g;
  };
  for (double T : spec.gap_durations) {
    LinkConfig link = spec.link;
    link.T = T;
    res.pairs.push_back(make_pair("T", T, link));
  }
  for (double d : spec.gap_distances) {
    LinkConfig link = spec.link;
    link.d = d;
    res.pairs.push_back(make_pair("d", d, link));
  }

  for (const auto& g : res.pairs) {
    const std::string tag = strfmt("%s%g", g.panel.c_str(), g.panel == "d" ? g.sweep_value * 1e6 : g.sweep_value);
    res.checks.push_back({"baseline_bep_nonincreasing_" + tag, detail::nonincreasing(g.baseline.bep),
                          strfmt("first=%.4g last=%.4g", g.baseline.bep.front(), g.baseline.bep.back())});
    const std::size_t imin = detail::argmin(g.proposed.bep);
    res.checks.push_back({"proposed_bep_non_monotone_" + tag, detail::has_interior_minimum(g.proposed.bep),
                          strfmt("argmin I=%.4g min=%.4g last=%.4g", res.grid[imin],
                                 g.proposed.bep[imin], g.proposed.bep.back())});
    bool gap_ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& e : g.gap) {
      if (e.clamped) continue;
      if (e.log10_ratio < -1e-9 || e.log10_ratio < prev - 1e-9) gap_ok = false;
      prev = e.log10_ratio;
    }
    res.checks.push_back({"gap_nonnegative_nondecreasing_" + tag, gap_ok, ""});
  }

  // short-link floor and far-link convergence, on the distance panel
  const GapPair* shortest = nullptr;
  const GapPair* longest = nullptr;
  for (const auto& g : res.pairs) {
    if (g.panel != "d") continue;
    if (!shortest || g.sweep_value < shortest->sweep_value) shortest = &g;
    if (!longest || g.sweep_value > longest->sweep_value) longest = &g;
  }
  if (shortest) {
    const EstimationGap& top = shortest->gap.back();
    const double tag = shortest->sweep_value * 1e6;
    res.checks.push_back({strfmt("gap_at_least_one_decade_top_d%gum", tag), top.log10_ratio >= 1.0,
                          strfmt("log10 ratio=%.4g at I=%g", top.log10_ratio, res.grid.back())});
    // "order of 1e-3": within one decade either side
    const double lg = std::log10(std::max(top.bep_proposed, kBepFloor));
    res.checks.push_back({strfmt("proposed_floor_order_1e-3_top_d%gum", tag),
                          std::abs(lg - std::log10(kGapTargetFloor)) <= 1.0,
                          strfmt("proposed BEP=%.4g", top.bep_proposed)});
    res.checks.push_back({strfmt("baseline_below_1e-6_top_d%gum", tag),
                          top.bep_baseline < kGapBaselineCeiling,
                          strfmt("baseline BEP=%.4g", top.bep_baseline)});
  }
  if (longest && longest != shortest) {
    const double i_opt = optimal_intensity(coef, longest->link);
    const EstimationGap e = estimation_gap(coef, longest->link, i_opt);
    const double ratio = e.bep_proposed / std::max(e.bep_baseline, kBepFloor);
    res.checks.push_back({strfmt("models_converge_near_i_opt_d%gum", longest->sweep_value * 1e6),
                          ratio <= kConvergenceFactor && ratio >= 1.0 / kConvergenceFactor,
                          strfmt("I_opt=%.4g proposed=%.4g baseline=%.4g ratio=%.4g", i_opt,
                                 e.bep_proposed, e.bep_baseline, ratio)});
  }
  return res;
}

inline ExperimentOutput to_output(const EstimationGapResult& r) {
  ExperimentOutput out;
  Table t{"estimation_gap",
          {"panel", "sweep_value", "model", "I", "bep", "gap_log10", "gap_clamped", "valid_flags"}, {}};
  for (const auto& g : r.pairs) {
    for (const BepCurve* c : {&g.proposed, &g.baseline}) {
      for (std::size_t i = 0; i < r.grid.size(); ++i) {
        t.add_row({g.panel, g.sweep_value, std::string(to_string(c->model)), r.grid[i], c->bep[i],
                   g.gap[i].log10_ratio, std::int64_t{g.gap[i].clamped ? 1 : 0}, c->flags[i]});
      }
    }
  }
  out.tables.push_back(std::move(t));
  out.checks = r.checks;
  return out;
}

/// Dispatches on spec.kind.
inline ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::pdf_validation: return to_output(run_pdf_validation(spec));
    case ExperimentKind::snr_sweep: return to_output(run_snr_sweep(spec));
    case ExperimentKind::bep_sensitivity: return to_output(run_bep_sensitivity(spec));
    case ExperimentKind::estimation_gap: return to_output(run_estimation_gap(spec));
    case ExperimentKind::empirical_bep: {
      spec.validate();
      const double I = spec.bep_intensity.value_or(
          optimal_intensity(derive_coefficients(spec.physics), spec.link));
      return to_output(run_empirical_bep(spec, I));
    }
  }
  throw std::logic_error("unknown experiment kind");
}

}  // namespace chemotx
