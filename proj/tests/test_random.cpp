// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "chemotx/random.hpp"
#include "chemotx/statistics.hpp"

using namespace chemotx;

// Published reference streams (seed 0).
TEST(Random, SplitMix64ReferenceStream) {
  SplitMix64 sm(0);
  EXPECT_EQ(sm(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(sm(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(sm(), 0x06c45d188009454fULL);
  EXPECT_EQ(sm(), 0xf88bb8a8724c81ecULL);
}

TEST(Random, Xoshiro256ReferenceStream) {
  Xoshiro256 x(0);
  EXPECT_EQ(x(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(x(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(x(), 0x1a5f849d4933e6e0ULL);
}

TEST(Random, SubSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 100000; ++k) seen.insert(sub_seed(7, k));
  EXPECT_EQ(seen.size(), 100000u);
  EXPECT_EQ(sub_seed(7, 3), sub_seed(7, 3));
  EXPECT_NE(sub_seed(7, 3), sub_seed(8, 3));
}

TEST(Random, Uniform01Range) {
  Xoshiro256 eng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(eng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, NormalSamplerMomentsAndKs) {
  Xoshiro256 eng(42);
  NormalSampler normal;
  std::vector<double> xs(400000);
  for (double& x : xs) x = normal(eng);
  const auto m = stats::moments(xs);
  EXPECT_NEAR(m.mean, 0.0, 5.0 * m.mean_se);
  EXPECT_NEAR(m.variance, 1.0, 5.0 * m.variance_se);
  EXPECT_NEAR(m.m4, 3.0, 0.05);
  EXPECT_LT(stats::ks_distance_normal(xs, 0.0, 1.0), stats::ks_critical_1pct(xs.size()));
}

TEST(Random, NormalSamplerTailMass) {
  Xoshiro256 eng(5);
  NormalSampler normal;
  const int n = 2000000;
  int beyond = 0;
  for (int i = 0; i < n; ++i) beyond += std::abs(normal(eng)) > 3.0;
  const double p = 2.0 * q_function(3.0);
  EXPECT_NEAR(static_cast<double>(beyond) / n, p, 5.0 * std::sqrt(p / n));
}

TEST(Random, NormalSamplerDeterministic) {
  Xoshiro256 a(9), b(9);
  NormalSampler na, nb;
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(na(a), nb(b));
}
