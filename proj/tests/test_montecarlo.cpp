// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "chemotx/montecarlo.hpp"

using namespace chemotx;

namespace {

ExperimentSpec small_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  const auto c = derive_coefficients(s.physics);
  s.link.sigma_m = calibrate_sigma_m(c, s.link.d, 50.0, 20.0);
  s.n_trials = 2000;
  s.dt = 1e-3;
  s.seed = 5;
  return s;
}

const Check& find(const std::vector<Check>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check " + name);
}

std::string render(const ExperimentOutput& out) {
  std::ostringstream os;
  for (const auto& t : out.tables) write_csv(os, t, {"x", 0, 0}, 12);
  return os.str();
}

}  // namespace

TEST(Montecarlo, KindNamesRoundTrip) {
  for (auto k : {ExperimentKind::pdf_validation, ExperimentKind::snr_sweep, ExperimentKind::bep_sensitivity,
                 ExperimentKind::estimation_gap, ExperimentKind::empirical_bep}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_experiment_kind("snr").has_value());
}

TEST(Montecarlo, SpecValidation) {
  auto s = small_spec(ExperimentKind::snr_sweep);
  s.intensity_grid = {1.0, 3.0, 2.0};
  EXPECT_THROW(s.validate(), ParameterError);
  s = small_spec(ExperimentKind::empirical_bep);
  s.n_trials = 10;
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(Montecarlo, PdfValidationMomentsAndChecks) {
  const auto s = small_spec(ExperimentKind::pdf_validation);
  const auto r = run_pdf_validation(s);
  ASSERT_EQ(r.curves.size(), 4u);
  for (const auto& c : r.curves) {
    EXPECT_NEAR(c.empirical.mean, c.analytic.mu, 5.0 * c.empirical.mean_se) << c.intensity;
    EXPECT_NEAR(c.empirical.variance, c.analytic.sigma_Y_sq, 5.0 * c.empirical.variance_se) << c.intensity;
  }
  EXPECT_TRUE(find(r.checks, "ks_below_1pct_critical_I10").passed);
  EXPECT_TRUE(find(r.checks, "ks_below_1pct_critical_I40").passed);
  EXPECT_TRUE(find(r.checks, "empirical_variance_increasing_in_I").passed);
  const auto out = to_output(r);
  EXPECT_EQ(out.tables.size(), 5u);
}

TEST(Montecarlo, PdfValidationIndependentOfThreads) {
  auto a = small_spec(ExperimentKind::pdf_validation);
  a.n_trials = 500;
  auto b = a;
  a.threads = 1;
  b.threads = 3;
  EXPECT_EQ(render(run_experiment(a)), render(run_experiment(b)));
}

TEST(Montecarlo, SnrSweepChecksPass) {
  const auto r = run_snr_sweep(small_spec(ExperimentKind::snr_sweep));
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
  ASSERT_EQ(r.curves.size(), 3u);
  EXPECT_NEAR(r.curves[1].i_opt_closed / r.curves[0].i_opt_closed, 2.0, 1e-12);
}

TEST(Montecarlo, BepSensitivityShapes) {
  const auto r = run_bep_sensitivity(small_spec(ExperimentKind::bep_sensitivity));
  EXPECT_EQ(r.curves.size(), 8u);
  EXPECT_TRUE(find(r.checks, "min_bep_higher_at_highest_viscosity").passed);
  EXPECT_TRUE(find(r.checks, "min_bep_higher_at_longest_symbol").passed);
  for (const auto& c : r.curves) EXPECT_EQ(c.bep.size(), r.grid.size());
}

TEST(Montecarlo, EstimationGapCurveShapes) {
  const auto r = run_estimation_gap(small_spec(ExperimentKind::estimation_gap));
  EXPECT_EQ(r.pairs.size(), 6u);
  for (const auto& c : r.checks) {
    if (c.name.rfind("baseline_bep_nonincreasing", 0) == 0 || c.name.rfind("proposed_bep_non_monotone", 0) == 0 ||
        c.name.rfind("gap_nonnegative", 0) == 0) {
      EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
    }
  }
}

TEST(Montecarlo, EmpiricalBepAtHighErrorRate) {
  auto s = small_spec(ExperimentKind::empirical_bep);
  s.link.sigma_m *= 8.0;
  s.n_trials = 4000;
  const auto r = run_empirical_bep(s, 30.0, SimulatedMobility::active);
  EXPECT_GT(r.errors, 100u);
  EXPECT_TRUE(r.analytic_inside()) << r.p_empirical << " vs " << r.p_analytic;
  const auto again = run_empirical_bep(s, 30.0, SimulatedMobility::active);
  EXPECT_EQ(again.errors, r.errors);
}

TEST(Montecarlo, PassiveSimulationRecoversBaselinePrediction) {
  auto s = small_spec(ExperimentKind::empirical_bep);
  s.link.sigma_m *= 8.0;
  s.n_trials = 4000;
  const auto r = run_empirical_bep(s, 30.0, SimulatedMobility::passive);
  EXPECT_TRUE(r.analytic_inside()) << r.p_empirical << " vs " << r.p_analytic;
}

TEST(Montecarlo, EveryTableCarriesValidityFlags) {
  for (auto kind : {ExperimentKind::pdf_validation, ExperimentKind::snr_sweep, ExperimentKind::bep_sensitivity,
                    ExperimentKind::estimation_gap, ExperimentKind::empirical_bep}) {
    auto s = small_spec(kind);
    s.n_trials = 1000;
    for (const auto& t : run_experiment(s).tables) {
      EXPECT_NE(std::find(t.columns.begin(), t.columns.end(), "valid_flags"), t.columns.end()) << t.name;
      EXPECT_FALSE(t.rows.empty()) << t.name;
    }
  }
}

TEST(Montecarlo, InvalidRegimeRowsAreKeptAndMarked) {
  auto s = small_spec(ExperimentKind::snr_sweep);
  s.intensity_grid = stats::geomspace(1.0, 2000.0, 40);
  const auto out = run_experiment(s);
  const auto& t = out.tables.front();
  const auto col = static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), "valid_flags") - t.columns.begin());
  std::size_t marked = 0;
  for (const auto& row : t.rows) marked += std::get<std::string>(row[col]).find("P0") != std::string::npos;
  EXPECT_EQ(t.rows.size(), 3u * 40u);
  EXPECT_GT(marked, 0u);
}
