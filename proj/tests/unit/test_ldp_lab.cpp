#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cpoly/error.hpp"
#include "cpoly/ldp_lab.hpp"

namespace cpoly {
namespace {

TEST(Green, Dimension2And3) {
  EXPECT_NEAR(lambda_constant(2), 2.0 / std::numbers::pi, 1e-15);
  const auto g = green_constants(3, 1e-4);
  EXPECT_TRUE(g.converged);
  EXPECT_NEAR(g.lambda_d, 2 * g.g_d - 1, 1e-15);
  EXPECT_NEAR(g.g_d, 1.516386, 2e-6);
  EXPECT_THROW(green_constants(1), InvalidArgument);
}

TEST(Green, DecreasingInDimension) {
  const double g3 = green_constants(3, 1e-3, 2048).g_d;
  const double g4 = green_constants(4, 1e-3, 2048).g_d;
  const double g5 = green_constants(5, 1e-3, 2048).g_d;
  EXPECT_GT(g3, g4);
  EXPECT_GT(g4, g5);
}

TEST(ExpectedQ, SmallN) {
  EXPECT_DOUBLE_EQ(expected_q(2, 4).value, 5.0);
  EXPECT_DOUBLE_EQ(expected_q(2, 2).value, 2.0);
  EXPECT_DOUBLE_EQ(expected_q(1, 2).value, 2.0);
  EXPECT_DOUBLE_EQ(expected_q(3, 1).value, 1.0);
}

TEST(ExpectedQ, MatchesEnumeration) {
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(expected_q(d, n).value, q_histogram_exact(d, n).mean(), 1e-12);
  }
}

TEST(Histogram, SmallCases) {
  const auto h2 = q_histogram_exact(2, 2);
  EXPECT_DOUBLE_EQ(h2.prob_le(2), 1.0);
  const auto h4 = q_histogram_exact(2, 4);
  EXPECT_DOUBLE_EQ(h4.total, 256.0);
  EXPECT_DOUBLE_EQ(h4.mean(), 5.0);
  std::uint64_t total = 0;
  for (auto [q, c] : h4.counts) total += c;
  EXPECT_EQ(total, 256u);
  // One-dimensional bridges of length 3: only EEE.
  const auto h1 = q_histogram_exact(1, 3);
  std::uint64_t bridges = 0;
  for (auto [q, c] : h1.bridge_counts) bridges += c;
  EXPECT_EQ(bridges, 1u);
}

TEST(Histogram, LaplaceAtZero) {
  const auto h = q_histogram_exact(3, 5);
  EXPECT_NEAR(h.log_laplace(0.0), 0.0, 1e-15);
  EXPECT_LT(h.log_laplace(0.1), 0.0);
}

TEST(Moments, MonteCarloMatchesExact) {
  const auto m = q_moments_mc(2, 4, 100000, 3);
  EXPECT_NEAR(m.mean, 5.0, 4 * m.mean_se);
  const auto h = q_histogram_exact(2, 6);
  const auto m6 = q_moments_mc(2, 6, 100000, 4);
  EXPECT_NEAR(m6.variance, h.variance(), 0.05 * h.variance());
}

TEST(Tail, TiltedMatchesExact) {
  const int n = 10;
  const auto h = q_histogram_exact(2, n);
  const std::int64_t q = 12;
  const double gamma = match_tilt(2, n, static_cast<double>(q), 1);
  const auto t = q_tail(2, n, q, gamma, 100000, 2);
  EXPECT_NEAR(t.log_p, std::log(h.prob_le(q)), 4 * t.log_se + 1e-3);
}

TEST(Tail, BelowNRejected) { EXPECT_THROW(match_tilt(2, 10, 5.0, 1), InvalidArgument); }

TEST(RateFunction, ExactAtOneIsShiftedSawCount) {
  const auto c = saw_counts(2, 9);
  const auto curve = rate_function(2, {1.0}, {10}, RateMethod::kExact);
  const double n = 10;
  EXPECT_NEAR(curve.points[0].estimate, -(std::log(4.0 * c[9]) - n * std::log(4.0)) / n, 1e-14);
}

TEST(RateFunction, InvalidT) { EXPECT_THROW(rate_function(2, {0.5}, {4}, RateMethod::kExact), InvalidArgument); }

TEST(SawCounts, Known) {
  const auto c2 = saw_counts(2, 10);
  const std::vector<std::uint64_t> expect = {1, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100};
  EXPECT_EQ(c2, expect);
  const auto c1 = saw_counts(1, 8);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(c1[static_cast<std::size_t>(n)], 2u);
  const auto c3 = saw_counts(3, 4);
  EXPECT_EQ(c3[2], 30u);
  EXPECT_EQ(c3[3], 150u);
}

TEST(SawCounts, Submultiplicative) {
  const auto c = saw_counts(2, 12);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t m = 1; n + m <= 12; ++m) EXPECT_LE(c[n + m], c[n] * c[m]);
  }
}

TEST(Wsaw, ZeroPenalty) {
  WsawOptions opt;
  opt.plan = {1000, 1, 1};
  opt.exact_max_n = 6;
  const auto r = wsaw_free_energy(3, 0.0, {2, 4, 8}, opt);
  for (const auto& rung : r.rungs) EXPECT_NEAR(rung.a_n, 0.0, 1e-12);
}

TEST(Wsaw, LowerBoundsBelowLambdaU) {
  WsawOptions opt;
  opt.plan = {4000, 7, 1};
  opt.exact_max_n = 6;
  opt.bridge_max_n = 64;
  const double u = 0.01;
  const auto r = wsaw_free_energy(3, u, {4, 64, 256}, opt);
  for (const auto& rung : r.rungs) {
    EXPECT_GE(rung.a_n, u - 1e-12);
    EXPECT_LE(rung.a_n, lambda_constant(3) * u + 3 * rung.std_error);
  }
  EXPECT_TRUE(r.consistent);
}

TEST(Wsaw, RosenbluthMatchesExact) {
  const auto h = q_histogram_exact(2, 8);
  const double u = 0.3;
  const auto r = wsaw_rung_mc(2, 8, u, {50000, 3, 1});
  EXPECT_NEAR(r.a_n, -h.log_laplace(u) / 8, 4 * r.std_error + 1e-4);
}

TEST(Wsaw, Deterministic) {
  const auto a = wsaw_rung_mc(3, 128, 1e-3, {2000, 7, 1});
  const auto b = wsaw_rung_mc(3, 128, 1e-3, {2000, 7, 1});
  EXPECT_EQ(a.a_n, b.a_n);
}

TEST(Varadhan, ExactHistogramResidualBound) {
  // E e^{-uQ} lies between the largest term e^{-uq} P(Q <= q) and the number
  // of support points times it, so the residual is at most log(#support)/n.
  const auto h = q_histogram_exact(2, 12);
  const auto r = varadhan_residual(h, {0.0, 0.01, 0.1, 0.5, 1.0, 2.0});
  EXPECT_NEAR(r.residuals[0], 0.0, 1e-12);
  EXPECT_LT(r.residuals[1], 0.05);
  EXPECT_LE(r.max_residual, std::log(static_cast<double>(h.counts.size())) / 12);
}

TEST(Range, Boundaries) {
  const auto p = range_ld_probe(1, 10, {0.0, 1.0}, 0, 0.5, {1000, 1, 1});
  EXPECT_DOUBLE_EQ(p.points[0].probability, 1.0);
  EXPECT_DOUBLE_EQ(p.points[0].exponent, 0.0);
  // R_n = n needs S_1..S_n distinct; S_0 is not a visit, so the first step
  // may be undone once: 4 paths.
  EXPECT_NEAR(p.points[1].probability, 4.0 / 1024.0, 1e-15);
}

TEST(Range, MonteCarloMatchesExact) {
  const auto ex = range_ld_probe(2, 8, {0.75}, 2, 0.5, {1000, 1, 1});
  const auto mc = range_ld_probe(2, 8, {0.75}, 2, 0.5, {200000, 1, 1}, 1.0);
  EXPECT_EQ(mc.method, "mc");
  const double p = ex.points[0].probability;
  EXPECT_NEAR(mc.points[0].probability, p, 4 * std::sqrt(p * (1 - p) / 200000));
}

}  // namespace
}  // namespace cpoly
