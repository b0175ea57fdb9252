// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "chemotx/mobility.hpp"
#include "chemotx/statistics.hpp"

using namespace chemotx;

namespace {

MobilityParams defaults(double U, double T = 1.0) {
  const auto c = derive_coefficients(PhysicalParams{});
  return {c.D_t, c.D_r, U, T};
}

}  // namespace

// 40-digit evaluations of (exp(-x) + x - 1) / D_r^2.
TEST(Mobility, GOfTReferenceValues) {
  const double Dr = 0.1609574352907262;
  EXPECT_NEAR(g_of_T(Dr, 1.0), 0.4742193928787083, 1e-15);
  EXPECT_NEAR(g_of_T(Dr, 10.0), 31.24784105002052, 1e-12);
  EXPECT_NEAR(g_of_T(0.16, 1e-5), 4.999997333334400e-11, 1e-10 * 5e-11);
  EXPECT_NEAR(g_of_T(0.16, 1e-3), 4.999733343999659e-07, 1e-10 * 5e-7);
}

TEST(Mobility, GOfTContinuousAcrossSeriesSwitch) {
  const double Dr = 2.0;
  const double T = kGSeriesSwitch / Dr;
  const double below = g_of_T(Dr, std::nextafter(T, 0.0));
  const double above = g_of_T(Dr, std::nextafter(T, 1.0));
  EXPECT_NEAR(below, above, 1e-10 * above);
}

TEST(Mobility, GOfTLimits) {
  // T^2/2 (1 - D_r T/3) up to O((D_r T)^2)
  EXPECT_NEAR(g_of_T(1e-3, 1e-2), 0.5e-4 * (1.0 - 1e-5 / 3.0), 1e-15);
  const double Dr = 5.0, T = 1000.0;
  EXPECT_NEAR(g_of_T(Dr, T), T / Dr - 1.0 / (Dr * Dr), 1e-9);
  double prev = 0.0;
  for (double t = 1e-6; t < 1e3; t *= 1.7) {
    const double g = g_of_T(0.16, t);
    ASSERT_GT(g, prev);
    prev = g;
  }
}

TEST(Mobility, PositionVarianceOracle) {
  EXPECT_NEAR(position_variance(defaults(2.5e-6)), 3.393091032933863e-12, 1e-12 * 3.39e-12);
  const auto passive = defaults(0.0);
  EXPECT_DOUBLE_EQ(position_variance(passive), 2.0 * passive.D_t);
}

TEST(Mobility, IntegratorConfigValidation) {
  const auto m = defaults(1e-6);
  auto cfg = IntegratorConfig::for_duration(1.0, 1e-4, 1);
  EXPECT_EQ(cfg.n_steps, 10000u);
  EXPECT_NO_THROW(cfg.validate(m));
  auto coarse = IntegratorConfig::for_duration(1.0, 0.5, 1);
  EXPECT_THROW(coarse.validate(m), ParameterError);
  auto mismatched = cfg;
  mismatched.n_steps = 5000;
  EXPECT_THROW(mismatched.validate(m), ParameterError);
  auto beyond = cfg;
  beyond.wall_position = -1e-6;
  EXPECT_THROW(beyond.validate(m), ParameterError);
  EXPECT_THROW(position_variance(defaults(-1.0)), ParameterError);
}

TEST(Mobility, DeterministicForSeed) {
  const auto m = defaults(5e-6);
  const auto cfg = IntegratorConfig::for_duration(1.0, 1e-3, 11);
  EXPECT_EQ(simulate_trajectory(m, cfg), simulate_trajectory(m, cfg));
}

TEST(Mobility, ThreadCountDoesNotChangeSamples) {
  const auto m = defaults(5e-6);
  const auto cfg = IntegratorConfig::for_duration(1.0, 1e-3, 3);
  const auto one = sample_positions(m, cfg, 500, 1);
  const auto four = sample_positions(m, cfg, 500, 4);
  EXPECT_EQ(one, four);
}

class MobilityVariance : public ::testing::TestWithParam<double> {};

TEST_P(MobilityVariance, EmpiricalMatchesClosedForm) {
  const auto m = defaults(GetParam());
  const auto cfg = IntegratorConfig::for_duration(1.0, 1e-3, 17);
  const auto xs = sample_positions(m, cfg, 8000);
  const auto mo = stats::moments(xs);
  const double expected = position_variance(m);
  EXPECT_NEAR(mo.mean, 0.0, 5.0 * mo.mean_se);
  EXPECT_NEAR(mo.variance, expected, 5.0 * mo.variance_se + 0.01 * expected);
}

INSTANTIATE_TEST_SUITE_P(Speeds, MobilityVariance, ::testing::Values(0.0, 1e-6, 5e-6));

TEST(Mobility, ReflectiveWallConfines) {
  const auto m = defaults(5e-6);
  auto cfg = IntegratorConfig::for_duration(1.0, 1e-3, 21);
  cfg.wall_position = 1e-6;
  const auto xs = sample_positions(m, cfg, 2000);
  for (double x : xs) ASSERT_LE(x, 1e-6);
}

TEST(Mobility, ParallelForRethrows) {
  EXPECT_THROW(parallel_for_index(100, 4,
                                  [](std::size_t i) {
                                    if (i == 57) throw std::runtime_error("boom");
                                  }),
               std::runtime_error);
}

TEST(Mobility, VarianceDecompositionExact) {
  for (double U : {1e-7, 1e-6, 5e-6, 2e-5}) {
    const auto m = defaults(U, 2.0);
    const auto p = defaults(0.0, 2.0);
    EXPECT_NEAR(position_variance(m) - position_variance(p), U * U * g_of_T(m.D_r, 2.0),
                1e-12 * position_variance(m));
  }
}

TEST(Mobility, GOfTNonnegativeIncreasingConvex) {
  EXPECT_EQ(g_of_T(0.16, 0.0), 0.0);
  const auto grid = stats::geomspace(1e-8, 1e3, 400);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double a = g_of_T(0.16, grid[i - 1]), b = g_of_T(0.16, grid[i]), c = g_of_T(0.16, grid[i + 1]);
    ASSERT_GE(a, 0.0);
    ASSERT_LT(a, b);
    // convexity on a non-uniform grid: slopes increase
    ASSERT_LE((b - a) / (grid[i] - grid[i - 1]), (c - b) / (grid[i + 1] - grid[i]) * (1.0 + 1e-12));
  }
}

namespace {

// Records every variate handed to the fine-step integration.
struct RecordingNormal {
  NormalSampler inner;
  std::vector<double>* tape;
  template <class Engine>
  double operator()(Engine& eng) {
    tape->push_back(inner(eng));
    return tape->back();
  }
};

// Replays two fine steps as one coarse step: same Brownian increments, summed.
struct CoarsenedNormal {
  const std::vector<double>* tape;
  std::size_t step = 0;
  bool rotational = false;
  template <class Engine>
  double operator()(Engine&) {
    const std::size_t base = 4 * step + (rotational ? 1 : 0);
    const double v = ((*tape)[base] + (*tape)[base + 2]) / std::numbers::sqrt2;
    if (rotational) ++step;
    rotational = !rotational;
    return v;
  }
};

}  // namespace

// Weak convergence: with coupled noise, halving dt moves the variance estimate by less than one SE.
TEST(Mobility, HalvingTimeStepWithinOneStandardError) {
  const auto m = defaults(5e-6);
  const auto coarse_cfg = IntegratorConfig::for_duration(1.0, 1e-3, 0);
  const auto fine_cfg = IntegratorConfig::for_duration(1.0, 5e-4, 0);
  const std::size_t n = 100000;
  std::vector<double> coarse(n), fine(n), tape;
  tape.reserve(2 * fine_cfg.n_steps);
  for (std::size_t k = 0; k < n; ++k) {
    tape.clear();
    Xoshiro256 e1(sub_seed(31, k));
    RecordingNormal rec{{}, &tape};
    fine[k] = integrate_axial(m, fine_cfg, e1, rec);
    Xoshiro256 e2(sub_seed(31, k));
    CoarsenedNormal replay{&tape};
    coarse[k] = integrate_axial(m, coarse_cfg, e2, replay);
  }
  const auto mc = stats::moments(coarse);
  const auto mf = stats::moments(fine);
  EXPECT_LT(std::abs(mc.variance - mf.variance), mf.variance_se)
      << "coarse " << mc.variance << " fine " << mf.variance << " SE " << mf.variance_se;
}

TEST(Mobility, GaussianAtModerateSpeed) {
  const auto m = defaults(1e-6);
  const auto cfg = IntegratorConfig::for_duration(1.0, 1e-4, 41);
  auto xs = sample_positions(m, cfg, 10000);
  const double sd = std::sqrt(position_variance(m));
  EXPECT_LT(stats::ks_distance_normal(xs, 0.0, sd), stats::ks_critical_1pct(xs.size()));
}

// At 5 um/s the displacement is visibly non-Gaussian; report the distance without asserting.
TEST(Mobility, GaussianityReportedAtHighSpeed) {
  const auto m = defaults(5e-6);
  const auto cfg = IntegratorConfig::for_duration(1.0, 1e-4, 43);
  auto xs = sample_positions(m, cfg, 10000);
  const double ks = stats::ks_distance_normal(xs, 0.0, std::sqrt(position_variance(m)));
  RecordProperty("ks_distance", std::to_string(ks));
  RecordProperty("ks_critical_1pct", std::to_string(stats::ks_critical_1pct(xs.size())));
  std::printf("KS distance at U = 5 um/s: %.4f (1%% critical %.4f)\n", ks, stats::ks_critical_1pct(xs.size()));
  EXPECT_GT(ks, 0.0);
}
