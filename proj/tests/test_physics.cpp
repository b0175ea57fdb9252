// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "chemotx/physics.hpp"

using namespace chemotx;

// Reference values from a 40-digit evaluation of the Stokes-Einstein relations.
TEST(Physics, StokesEinsteinDefaults) {
  const auto c = derive_coefficients(PhysicalParams{});
  EXPECT_NEAR(c.D_t, 2.146099137209683e-13, 1e-12 * 2.146e-13);
  EXPECT_NEAR(c.D_r, 0.1609574352907262, 1e-12);
  EXPECT_NEAR(c.tau_r, 6.212822652111532, 1e-10);
  EXPECT_DOUBLE_EQ(c.D_r * c.tau_r, 1.0);
}

TEST(Physics, LumpedGainsDefaults) {
  const auto c = derive_coefficients(PhysicalParams{});
  EXPECT_NEAR(c.K_control, 5e-8, 1e-22);
  EXPECT_NEAR(c.A_cap, 2.0 * std::numbers::pi * 1e-12, 1e-26);
  EXPECT_NEAR(c.kappa_em, 1e18 * c.A_cap, 1e-3);
  EXPECT_NEAR(c.G_ch, 2.5e14, 1.0);
  EXPECT_DOUBLE_EQ(c.H0, c.G_ch);
  EXPECT_DOUBLE_EQ(propulsion_speed(c, 50.0), 2.5e-6);
}

TEST(Physics, SignOfMobilityFlipsSpeed) {
  PhysicalParams p;
  p.b_dp = 4e-34;
  EXPECT_LT(derive_coefficients(p).K_control, 0.0);
}

TEST(Physics, ZeroCapDisablesPropulsion) {
  PhysicalParams p;
  p.alpha = 0.0;
  const auto c = derive_coefficients(p);
  EXPECT_EQ(c.K_control, 0.0);
  EXPECT_EQ(c.A_cap, 0.0);
}

TEST(Physics, RejectsNonPhysicalInputs) {
  auto bad = [](auto mutate) {
    PhysicalParams p;
    mutate(p);
    EXPECT_THROW(derive_coefficients(p), ParameterError);
  };
  bad([](PhysicalParams& p) { p.a = 0.0; });
  bad([](PhysicalParams& p) { p.eta = -1.0; });
  bad([](PhysicalParams& p) { p.T_env = std::nan(""); });
  bad([](PhysicalParams& p) { p.alpha = 4.0; });
  bad([](PhysicalParams& p) { p.D_fuel = 0.0; });
  bad([](PhysicalParams& p) { p.kappa_base = -1.0; });
  const auto c = derive_coefficients(PhysicalParams{});
  EXPECT_THROW(propulsion_speed(c, -1.0), ParameterError);
  try {
    PhysicalParams p;
    p.a = -1.0;
    p.validate();
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "a");
  }
}

// Dipole chain and lumped gain must agree for any admissible parameter draw.
TEST(PhysicsProperty, AppendixChainMatchesLumpedGain) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto logu = [&](double lo, double hi) { return lo * std::pow(hi / lo, u01(rng)); };
  for (int k = 0; k < 1000; ++k) {
    PhysicalParams p;
    p.a = logu(1e-7, 1e-5);
    p.eta = logu(1e-4, 1e-1);
    p.alpha = std::numbers::pi * u01(rng);
    p.kappa_base = logu(1e15, 1e21);
    p.b_dp = (u01(rng) < 0.5 ? -1.0 : 1.0) * logu(1e-36, 1e-32);
    p.D_fuel = logu(1e-10, 1e-8);
    const double I = logu(0.1, 500.0);
    const auto chain = appendix_chain(p, I);
    const double lumped = propulsion_speed(derive_coefficients(p), I);
    ASSERT_NEAR(chain.U, lumped, 1e-12 * std::abs(lumped)) << "draw " << k;
    ASSERT_NEAR(chain.B1, 1.5 * chain.U, 1e-14 * std::abs(chain.B1));
  }
}

TEST(PhysicsProperty, DiffusivityRatioIsGeometric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    PhysicalParams p;
    p.a = 1e-7 * std::pow(100.0, u(rng));
    p.eta = 1e-4 * std::pow(1000.0, u(rng));
    p.T_env = 250.0 + 100.0 * u(rng);
    const auto c = derive_coefficients(p);
    ASSERT_NEAR(c.D_t / c.D_r, 4.0 * p.a * p.a / 3.0, 4e-15 * p.a * p.a);
  }
}

TEST(PhysicsProperty, GainScalingLaws) {
  const PhysicalParams base;
  const double k0 = derive_coefficients(base).K_control;
  auto with = [&](auto mutate) {
    PhysicalParams p = base;
    mutate(p);
    return derive_coefficients(p).K_control;
  };
  EXPECT_NEAR(with([](PhysicalParams& p) { p.b_dp *= 3.0; }), 3.0 * k0, 1e-15 * k0);
  EXPECT_NEAR(with([](PhysicalParams& p) { p.kappa_base *= 0.25; }), 0.25 * k0, 1e-15 * k0);
  EXPECT_NEAR(with([](PhysicalParams& p) { p.D_fuel *= 2.0; }), 0.5 * k0, 1e-15 * k0);
  const double s = std::sin(std::numbers::pi / 6.0);
  EXPECT_NEAR(with([](PhysicalParams& p) { p.alpha = std::numbers::pi / 6.0; }), s * s * k0, 1e-15 * k0);
  EXPECT_EQ(with([](PhysicalParams& p) { p.a *= 7.0; }), k0);
}

TEST(PhysicsProperty, DeterministicBitForBit) {
  PhysicalParams p;
  p.a = 1.37e-6;
  const auto a = derive_coefficients(p);
  const auto b = derive_coefficients(p);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}
