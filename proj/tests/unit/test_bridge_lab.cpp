#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cpoly/bridge_lab.hpp"
#include "cpoly/error.hpp"

namespace cpoly {
namespace {

TEST(BridgeExact, SmallN) {
  EXPECT_DOUBLE_EQ(bridge_probability_exact(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(bridge_probability_exact(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(bridge_probability_exact(1, 3), 0.125);
  EXPECT_DOUBLE_EQ(bridge_probability_exact(2, 1), 0.25);
}

TEST(BridgeExact, MatchesEnumeration) {
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 7; ++n) {
      double bridges = 0, total = 0;
      enumerate_walks(d, n, [&](const WalkPath& p) {
        total += 1;
        bridges += is_bridge(p) ? 1 : 0;
      });
      EXPECT_NEAR(bridge_probability_exact(d, n), bridges / total, 1e-15) << d << " " << n;
    }
  }
}

TEST(BridgeSeries, MonteCarloMatchesExact) {
  const auto s = bridge_probability(2, {32}, BridgeMethod::kMonteCarlo, {400000, 5, 1});
  EXPECT_NEAR(s.rungs[0].p_hat, bridge_probability_exact(2, 32), 4 * s.rungs[0].std_error);
  EXPECT_FALSE(s.rungs[0].exact);
}

TEST(BridgeSeries, AutoSwitchesAndRatios) {
  const auto s = bridge_probability(2, {8, 16, 32}, BridgeMethod::kAuto, {64000, 1, 1}, 16);
  EXPECT_TRUE(s.rungs[0].exact);
  EXPECT_TRUE(s.rungs[1].exact);
  EXPECT_FALSE(s.rungs[2].exact);
  ASSERT_EQ(s.ratios.size(), 2u);
}

TEST(BridgeSeries, ZeroHitsOneSided) {
  const auto s = bridge_probability(1, {400}, BridgeMethod::kMonteCarlo, {64, 1, 1});
  EXPECT_TRUE(s.rungs[0].one_sided);
  EXPECT_NEAR(s.rungs[0].p_hat, 3.0 / 64, 1e-15);
}

TEST(CPrime, BelowOneOverTwoPi) {
  for (std::int64_t n : {16, 64, 256}) EXPECT_LT(c_prime_d1(n), 1.0 / (2 * std::numbers::pi));
  EXPECT_NEAR(c_prime_d1(256), c_prime_d1(512), 0.01);
}

TEST(Ballot, SpecificRows) {
  const auto r = ballot_check(3);
  EXPECT_TRUE(r.all_match);
  for (const auto& row : r.rows) {
    if (row.n == 3 && row.k == 3) {
      EXPECT_EQ(row.positive, 1u);
      EXPECT_EQ(row.all, 1u);
    }
    if (row.n == 3 && row.k == 1) {
      EXPECT_EQ(row.positive, 1u);
      EXPECT_EQ(row.all, 3u);
    }
    if (row.k <= 0) {
      EXPECT_EQ(row.positive, 0u);
    }
  }
  EXPECT_THROW(ballot_check(25), InvalidArgument);
}

TEST(ConditionalQ, FloorAndBound) {
  const auto s = conditional_q_bridge(3, {16, 64}, {2000, 3, 1});
  for (const auto& p : s.points) {
    EXPECT_GE(p.mean, 1.0);
    EXPECT_LE(p.mean, s.lambda * 1.05);
  }
  EXPECT_LT(s.points[0].mean, s.points[1].mean);
}

TEST(ConditionalQ, AcceptanceTooLow) {
  EXPECT_THROW(conditional_q_bridge(3, {256}, {64, 1, 1}, 0.05, 0.001), AcceptanceTooLow);
}

TEST(SiltTail, HugeSlack) {
  const auto s = bridge_silt_tail({64}, 10.0, {1000, 2, 1});
  EXPECT_NEAR(s.points[0].probability, 1.0, 1e-12);
  const auto neg = bridge_silt_tail({64}, -0.9, {1000, 2, 1});
  EXPECT_NEAR(neg.points[0].probability, 0.0, 1e-12);
}

}  // namespace
}  // namespace cpoly
