#include <gtest/gtest.h>

#include <cmath>

#include "cpoly/error.hpp"
#include "cpoly/lattice_walk.hpp"

namespace cpoly {
namespace {

TEST(LocalTimes, SingleStep) {
  const auto lt = local_times(WalkPath::parse(2, "E"));
  ASSERT_EQ(lt.range(), 1u);
  EXPECT_EQ(lt.at(make_site({1, 0})), 1);
  EXPECT_EQ(lt.at(make_site({0, 0})), 0);
}

TEST(LocalTimes, OscillationCountsReturnsButNotStart) {
  const auto lt = local_times(WalkPath::parse(2, "EWEW"));
  EXPECT_EQ(lt.range(), 2u);
  EXPECT_EQ(lt.at(make_site({1, 0})), 2);
  EXPECT_EQ(lt.at(make_site({0, 0})), 2);
}

TEST(LocalTimes, MonotoneOneDimensional) {
  const auto lt = local_times(WalkPath::parse(1, "EEE"));
  for (int x = 1; x <= 3; ++x) EXPECT_EQ(lt.at(make_site({x})), 1);
}

TEST(LocalTimes, EmptyPathRejected) { EXPECT_THROW(local_times(WalkPath(2, {})), InvalidArgument); }

TEST(WalkPath, ParseRejectsForeignSteps) {
  EXPECT_THROW(WalkPath::parse(1, "N"), InvalidArgument);
  EXPECT_THROW(WalkPath::parse(2, "EX"), InvalidArgument);
}

TEST(WalkPath, RoundTripAndConcat) {
  const auto p = WalkPath::parse(3, "ENUD");
  EXPECT_EQ(p.to_string(), "ENUD");
  const auto q = p.concat(WalkPath::parse(3, "W"));
  EXPECT_EQ(q.endpoint(), make_site({0, 1, 0}));
  EXPECT_EQ(q.positions().size(), 6u);
}

TEST(Summarize, StraightPathIsSelfAvoidingBridge) {
  for (int d = 1; d <= 4; ++d) {
    const auto s = summarize(WalkPath(d, std::vector<std::uint8_t>(7, 0)), 1);
    EXPECT_EQ(s.q_n, 7);
    EXPECT_EQ(s.range, 7);
    EXPECT_TRUE(s.is_bridge);
  }
}

TEST(Summarize, TrimmedQuantities) {
  const auto s = summarize(WalkPath::parse(2, "EWEW"), 1);
  EXPECT_EQ(s.q_n, 8);
  EXPECT_EQ(s.range, 2);
  EXPECT_EQ(s.trimmed_range, 0);
  EXPECT_EQ(s.trimmed_time, 0);
  const auto t = summarize(WalkPath::parse(2, "EWEW"), 2);
  EXPECT_EQ(t.trimmed_range, 2);
  EXPECT_EQ(t.trimmed_time, 4);
}

TEST(Bridge, Definition) {
  EXPECT_TRUE(is_bridge(WalkPath::parse(1, "EE")));
  EXPECT_FALSE(is_bridge(WalkPath::parse(1, "EEW")));
  EXPECT_FALSE(is_bridge(WalkPath::parse(1, "EWE")));
  EXPECT_TRUE(is_bridge(WalkPath::parse(2, "E")));
  EXPECT_FALSE(is_bridge(WalkPath::parse(2, "N")));
  EXPECT_TRUE(is_bridge(WalkPath::parse(2, "ENE")));
  EXPECT_FALSE(is_bridge(WalkPath::parse(2, "EEN")));
}

TEST(Enumerate, CountsAndQ2) {
  int count = 0;
  enumerate_walks(2, 2, [&](const WalkPath& p) {
    ++count;
    EXPECT_EQ(summarize(p, 1).q_n, 2);
  });
  EXPECT_EQ(count, 16);
  count = 0;
  enumerate_walks(1, 3, [&](const WalkPath&) { ++count; });
  EXPECT_EQ(count, 8);
}

TEST(Enumerate, MeanQ4IsFive) {
  double total = 0.0;
  int count = 0;
  enumerate_walks(2, 4, [&](const WalkPath& p) {
    total += static_cast<double>(summarize(p, 1).q_n);
    ++count;
  });
  EXPECT_EQ(count, 256);
  EXPECT_DOUBLE_EQ(total / count, 5.0);
}

TEST(Enumerate, LexicographicOrder) {
  std::vector<std::string> seen;
  enumerate_walks(1, 2, [&](const WalkPath& p) { seen.push_back(p.to_string()); });
  EXPECT_EQ(seen, (std::vector<std::string>{"EE", "EW", "WE", "WW"}));
}

TEST(Enumerate, BudgetEnforced) {
  EXPECT_THROW(enumerate_walks(2, 20, [](const WalkPath&) {}, 1e6), BudgetExceeded);
}

TEST(Sampling, DeterministicForFixedSeed) {
  Stream a(42);
  Stream b(42);
  EXPECT_EQ(sample_walk(2, 10, a), sample_walk(2, 10, b));
  Stream c(43);
  Stream d(42);
  EXPECT_NE(sample_walk(2, 50, c), sample_walk(2, 50, d));
}

TEST(Sampling, BridgeAcceptanceD1N2) {
  Stream s(7);
  std::uint64_t rejections = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto b = sample_bridge(1, 2, s, 1000);
    EXPECT_EQ(b.path.to_string(), "EE");
    rejections += b.rejections;
  }
  const double acceptance = draws / static_cast<double>(draws + rejections);
  EXPECT_NEAR(acceptance, 0.25, 0.01);
}

TEST(Sampling, BridgeAcceptanceD2N1) {
  Stream s(8);
  std::uint64_t rejections = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) rejections += sample_bridge(2, 1, s, 1000).rejections;
  EXPECT_NEAR(draws / static_cast<double>(draws + rejections), 0.25, 0.01);
}

TEST(Sampling, BridgeAcceptanceTooLow) {
  Stream s(9);
  EXPECT_THROW(sample_bridge(2, 200, s, 10), AcceptanceTooLow);
}

TEST(ReturnProbabilities, SmallValues) {
  const auto p2 = return_probabilities(2, 4);
  EXPECT_DOUBLE_EQ(p2[0], 1.0);
  EXPECT_DOUBLE_EQ(p2[1], 0.0);
  EXPECT_DOUBLE_EQ(p2[2], 0.25);
  EXPECT_NEAR(p2[4], 36.0 / 256.0, 1e-15);
  const auto p1 = return_probabilities(1, 2);
  EXPECT_DOUBLE_EQ(p1[2], 0.5);
  for (int d = 1; d <= 5; ++d) EXPECT_EQ(return_probabilities(d, 3)[1], 0.0);
}

TEST(ReturnProbabilities, AxisSplitMatchesBoxDp) {
  for (int d = 1; d <= 3; ++d) {
    const auto a = return_probabilities(d, 40);
    const auto b = return_probabilities_box(d, 40);
    for (std::size_t r = 0; r < a.size(); ++r) EXPECT_NEAR(a[r], b[r], 1e-15 + 1e-12 * b[r]) << d << " " << r;
  }
}

TEST(SiteCounter, MatchesLocalTimes) {
  Stream s(3);
  const auto path = sample_walk(3, 200, s);
  SiteCounter counter(3, 200);
  std::int64_t q = 0;
  for (auto c : path.steps()) q += 2 * counter.step(c) + 1;
  EXPECT_EQ(q, summarize(path, 1).q_n);
  EXPECT_EQ(counter.range(), local_times(path).range());
}

}  // namespace
}  // namespace cpoly
