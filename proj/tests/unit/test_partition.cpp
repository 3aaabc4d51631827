#include <gtest/gtest.h>

#include <cmath>

#include "cpoly/error.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/partition.hpp"
#include "cpoly/single_site.hpp"

namespace cpoly {
namespace {

TEST(Hamiltonian, SelfAvoidingHasNoPairs) {
  const std::vector<double> w = {0.5, -1.0, 2.0};
  const auto h = hamiltonian(WalkPath::parse(2, "ENE"), w);
  EXPECT_DOUBLE_EQ(h.pair, 0.0);
  EXPECT_DOUBLE_EQ(h.square, 0.25 + 1.0 + 4.0);
}

TEST(Hamiltonian, Oscillation) {
  const std::vector<double> w = {1, 1, 1, 1};
  const auto h = hamiltonian(WalkPath::parse(2, "EWEW"), w);
  EXPECT_DOUBLE_EQ(h.square, 8.0);
  EXPECT_DOUBLE_EQ(h.pair, 2.0);
  const std::vector<double> zero(4, 0.0);
  const auto z = hamiltonian(WalkPath::parse(2, "EWEW"), zero);
  EXPECT_DOUBLE_EQ(z.square, 0.0);
  EXPECT_DOUBLE_EQ(z.pair, 0.0);
}

TEST(Hamiltonian, LengthMismatch) {
  const std::vector<double> w = {1, 1};
  EXPECT_THROW(hamiltonian(WalkPath::parse(2, "EWE"), w), InvalidArgument);
}

TEST(ZExact, ZeroCouplingFactorizes) {
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::gaussian(), ChargeLaw::three_point(2)}) {
    const auto e = z_exact(law, {0.7, 0.0}, 2, 6);
    EXPECT_NEAR(e.log_value, 6 * log_mgf(law, 0.7), 1e-12) << law.id();
    EXPECT_NEAR(z_exact(law, {0.7, 0.0}, 2, 6, Quantity::kZ).log_value, 0.0, 1e-12) << law.id();
  }
  EXPECT_NEAR(z_exact(ChargeLaw::gaussian(), {0.0, 0.0}, 3, 4).log_value, 0.0, 1e-15);
}

TEST(ZExact, MatchesDoubleEnumeration) {
  const auto law = ChargeLaw::rademacher();
  const auto a = z_exact(law, {0.3, 0.2}, 2, 4);
  const auto b = z_double_enum(law, {0.3, 0.2}, 2, 4, Quantity::kZStar);
  EXPECT_NEAR(a.log_value, b.log_value, 1e-12);
  EXPECT_EQ(a.std_error, 0.0);
}

TEST(ZExact, ShardsDoNotChangeValue) {
  const auto law = ChargeLaw::three_point(2);
  const auto a = z_exact(law, {0.3, 0.2}, 2, 7, Quantity::kZStar, 1);
  const auto b = z_exact(law, {0.3, 0.2}, 2, 7, Quantity::kZStar, 3);
  EXPECT_NEAR(a.log_value, b.log_value, 1e-14);
}

TEST(ZExact, BudgetExceeded) {
  EXPECT_THROW(z_exact(ChargeLaw::gaussian(), {0.1, 0.1}, 2, 12, Quantity::kZStar, 1, 1e6), BudgetExceeded);
}

TEST(DoubleEnum, OneStepIsSingleSite) {
  const auto law = ChargeLaw::three_point(2);
  const double z = z_double_enum(law, {0.4, 0.3}, 2, 1).log_value;
  EXPECT_NEAR(z, log_g_tilted(law, {0.4, 0.3}, 1).log_value, 1e-13);
}

TEST(DoubleEnum, RademacherTwoSteps) {
  // Two distinct sites, w^2 = 1: Z = e^{-2 beta}.
  EXPECT_NEAR(z_double_enum(ChargeLaw::rademacher(), {0.0, 1.0}, 1, 2).log_value, -2.0, 1e-14);
}

TEST(DoubleEnum, SmallGrid) {
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::three_point(2)}) {
    for (int d : {1, 2}) {
      for (int n = 1; n <= 5; ++n) {
        const auto de = DoubleEnumeration::build(law, d, n);
        for (double delta : {0.0, 1.0}) {
          for (double beta : {0.2, 1.0}) {
            EXPECT_NEAR(de.evaluate({delta, beta}, Quantity::kZ).log_value,
                        z_exact(law, {delta, beta}, d, n, Quantity::kZ).log_value, 1e-12);
          }
        }
      }
    }
  }
}

TEST(DoubleEnum, DensityLawRejected) {
  EXPECT_THROW(DoubleEnumeration::build(ChargeLaw::gaussian(), 2, 3), InvalidArgument);
}

McConfig small_mc(std::uint64_t samples, std::uint64_t seed) {
  McConfig mc;
  mc.samples = samples;
  mc.seed = seed;
  return mc;
}

TEST(ZMonteCarlo, ZeroCouplingExact) {
  const auto e = z_mc(ChargeLaw::gaussian(), {0.5, 0.0}, 2, 50, small_mc(1000, 1));
  EXPECT_NEAR(e.log_value, 50 * 0.125, 1e-12);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(ZMonteCarlo, AgreesWithExact) {
  const auto law = ChargeLaw::gaussian();
  const auto exact = z_exact(law, {0.3, 0.2}, 2, 8);
  const auto mc = z_mc(law, {0.3, 0.2}, 2, 8, small_mc(200000, 17));
  EXPECT_NEAR(mc.log_value, exact.log_value, 4 * mc.std_error + 1e-12);
  EXPECT_GT(mc.std_error, 0.0);
}

TEST(ZMonteCarlo, Deterministic) {
  const auto law = ChargeLaw::rademacher();
  McConfig mc = small_mc(20000, 5);
  const auto a = z_mc(law, {0.3, 0.4}, 2, 30, mc);
  mc.shards = 2;
  const auto b = z_mc(law, {0.3, 0.4}, 2, 30, mc);
  EXPECT_EQ(a.log_value, b.log_value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(ZMonteCarlo, ValidatesConfig) {
  McConfig mc = small_mc(100, 1);
  mc.batches = 8;
  EXPECT_THROW(z_mc(ChargeLaw::gaussian(), {0.3, 0.2}, 2, 8, mc), InvalidArgument);
  EXPECT_THROW(z_mc(ChargeLaw::gaussian(), {-0.3, 0.2}, 2, 8, small_mc(100, 1)), InvalidArgument);
}

TEST(Confinement, LowerBoundOnExact) {
  const auto law = ChargeLaw::gaussian();
  const auto exact = z_exact(law, {0.0, 1.0}, 2, 8);
  const auto conf = z_confined(law, {0.0, 1.0}, 2, 8, small_mc(50000, 3));
  EXPECT_LE(conf.log_value, exact.log_value + 4 * conf.std_error);
  EXPECT_GE(confinement_radius(2, 8), 1.0);
}

TEST(Ladder, ZeroCouplingIsLogMgf) {
  LadderOptions opt;
  opt.mc = small_mc(1000, 1);
  const auto r = free_energy_ladder(ChargeLaw::rademacher(), {0.6, 0.0}, 2, {4, 8, 16}, opt);
  for (const auto& rung : r.rungs) EXPECT_NEAR(rung.a_n, log_mgf(ChargeLaw::rademacher(), 0.6), 1e-12);
  EXPECT_NEAR(r.f, 0.0, 1e-12);
  EXPECT_TRUE(r.sandwich_ok);
}

TEST(Ladder, ExtendedPhasePositive) {
  LadderOptions opt;
  opt.mc = small_mc(40000, 9);
  const auto r = free_energy_ladder(ChargeLaw::gaussian(), {1.0, 0.05}, 2, {8, 16, 32, 64}, opt);
  for (const auto& rung : r.rungs) EXPECT_GT(rung.a_n, 0.0);
  EXPECT_GT(r.f_star, 0.0);
  EXPECT_TRUE(r.sandwich_ok);
}

TEST(Ladder, CollapsedSmallRungs) {
  LadderOptions opt;
  opt.mc = small_mc(20000, 4);
  const auto r = free_energy_ladder(ChargeLaw::gaussian(), {0.0, 1.0}, 2, {4, 8, 16}, opt);
  // g*_{0, beta} <= 1, so every rung is non-positive, and |a_n| shrinks.
  for (const auto& rung : r.rungs) EXPECT_LE(rung.a_n, 1e-12);
  EXPECT_GT(r.rungs.back().a_n, r.rungs.front().a_n);
}

TEST(Asymptote, Predictions) {
  const auto g = beta_c_asymptote(ChargeLaw::gaussian(), 0.1, AsymptoticRegime::kSmall, 3);
  EXPECT_NEAR(g.kappa, 0.25 * lambda_constant(3), 1e-12);
  EXPECT_NEAR(g.kappa_lower, 0.25, 1e-12);
  const auto r = beta_c_asymptote(ChargeLaw::rademacher(), 7.0, AsymptoticRegime::kLarge);
  EXPECT_NEAR(r.lower, 7.0, 1e-12);
  const auto t = beta_c_asymptote(ChargeLaw::three_point(2), 0.1, AsymptoticRegime::kSmall, 3);
  EXPECT_LT(t.kappa_lower, 0.0);
}

TEST(CriticalScan, BracketBelowSymmetricBound) {
  ScanOptions opt;
  opt.mc = small_mc(10000, 3);
  opt.tol = 0.02;
  const auto s = critical_scan(ChargeLaw::gaussian(), {0.5, 1.0}, 2, 64, opt);
  ASSERT_EQ(s.entries.size(), 2u);
  for (const auto& e : s.entries) {
    EXPECT_LE(e.beta_lo, e.beta_hi);
    EXPECT_LE(e.beta_hi, e.delta * e.delta / 2 + (e.beta_hi - e.beta_lo) + 1e-12);
  }
}

}  // namespace
}  // namespace cpoly
