#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cpoly/error.hpp"
#include "cpoly/single_site.hpp"

namespace cpoly {
namespace {

TEST(GStar, GaussianClosedForm) {
  EXPECT_NEAR(g_star(ChargeLaw::gaussian(), {0.0, 0.5}, 1), std::sqrt(0.5), 1e-15);
  const double delta = 0.8, beta = 0.3;
  for (std::int64_t ell : {1, 7, 40}) {
    const double d = 1 + 2 * beta * ell;
    EXPECT_NEAR(g_star(ChargeLaw::gaussian(), {delta, beta}, ell),
                std::sqrt(1 / d) * std::exp(delta * delta * ell / (2 * d)), 1e-13);
  }
}

TEST(GStar, EmptySiteIsOne) {
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::gaussian(), ChargeLaw::three_point(2), ChargeLaw::uniform()}) {
    EXPECT_DOUBLE_EQ(g_star(law, {0.7, 0.4}, 0), 1.0) << law.id();
  }
}

TEST(GStar, RademacherSingleVisit) {
  for (double delta : {0.0, 0.5, 2.0}) {
    for (double beta : {0.0, 0.2, 1.0}) {
      EXPECT_NEAR(g_star(ChargeLaw::rademacher(), {delta, beta}, 1), std::exp(-beta) * std::cosh(delta), 1e-14);
    }
  }
}

TEST(GStar, ZeroBetaIsMgfPower) {
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::three_point(2), ChargeLaw::gaussian()}) {
    for (std::int64_t ell : {1, 3, 9}) {
      EXPECT_NEAR(log_g_star(law, {0.6, 0.0}, ell).log_value, ell * log_mgf(law, 0.6), 1e-12) << law.id();
    }
  }
}

TEST(GStar, ModesAgreeForLatticeLaws) {
  const auto law = ChargeLaw::three_point(2);
  for (std::int64_t ell : {1, 4, 15}) {
    const double conv = log_g_star(law, {0.4, 0.3}, ell, EvalMode::kExactConvolution).log_value;
    const double mc = log_g_star(law, {0.4, 0.3}, ell, EvalMode::kMonteCarlo, {400000, 5}).log_value;
    EXPECT_NEAR(mc, conv, 0.02);
  }
}

TEST(GStar, UniformQuadratureMatchesSmallEllDirect) {
  // l = 1: E[exp(delta w - beta w^2)] over uniform [-sqrt3, sqrt3] by brute Riemann sum.
  const double a = std::sqrt(3.0);
  const int m = 200000;
  double s = 0;
  for (int i = 0; i < m; ++i) {
    const double w = -a + (i + 0.5) * 2 * a / m;
    s += std::exp(0.5 * w - 0.2 * w * w);
  }
  s /= m;
  EXPECT_NEAR(g_star(ChargeLaw::uniform(), {0.5, 0.2}, 1), s, 1e-9);
}

TEST(GStar, IncompatibleModeRejected) {
  EXPECT_THROW(log_g_star(ChargeLaw::rademacher(), {0.1, 0.1}, 3, EvalMode::kClosedForm), InvalidArgument);
}

TEST(GStar, GaussianQuadratureMatchesClosedForm) {
  for (double delta : {0.0, 1.0, 2.0}) {
    for (double beta : {0.01, 1.0}) {
      for (std::int64_t ell : {1, 16, 64}) {
        const double cf = log_g_star(ChargeLaw::gaussian(), {delta, beta}, ell, EvalMode::kClosedForm).log_value;
        const double q = log_g_star(ChargeLaw::gaussian(), {delta, beta}, ell, EvalMode::kQuadrature).log_value;
        EXPECT_NEAR(q, cf, 1e-10 * std::max(1.0, std::abs(cf)));
      }
    }
  }
}

TEST(Split, Components) {
  const auto z = g_attractive_repulsive_split(0.0, 0.5, 3);
  EXPECT_DOUBLE_EQ(z.repulsive, 0.0);
  const auto e = g_attractive_repulsive_split(1.0, 0.5, 0);
  EXPECT_DOUBLE_EQ(e.attractive, 0.0);
  EXPECT_DOUBLE_EQ(e.repulsive, 0.0);
  const auto s = g_attractive_repulsive_split(1.0, 0.5, 1);
  EXPECT_NEAR(s.attractive, 0.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(s.repulsive, -0.25, 1e-15);
  EXPECT_NEAR(s.attractive + s.repulsive, -log_g_star(ChargeLaw::gaussian(), {1.0, 0.5}, 1).log_value, 1e-15);
}

TEST(Table, MatchesPointwise) {
  const auto law = ChargeLaw::rademacher();
  const auto t = SingleSiteTable::build(law, {0.5, 0.1}, 30);
  ASSERT_EQ(t.max_ell(), 30);
  for (std::int64_t ell = 0; ell <= 30; ++ell) {
    EXPECT_NEAR(t.log_value(ell), log_g_star(law, {0.5, 0.1}, ell).log_value, 1e-12);
  }
  const auto header = t.to_csv().substr(0, t.to_csv().find('\n'));
  EXPECT_EQ(header, "ell,log_g_star,mode,err_bound");
}

TEST(Bounds, SymmetricUnitBound) {
  std::vector<double> grid;
  for (int k = 0; k <= 30; ++k) grid.push_back(0.1 * k);
  EXPECT_TRUE(check_symmetric_unit_bound(ChargeLaw::gaussian(), grid, 1000).pass);
  EXPECT_TRUE(check_symmetric_unit_bound(ChargeLaw::rademacher(), grid, 200).pass);
  EXPECT_NEAR(g_star(ChargeLaw::rademacher(), {0.5, 0.125}, 1), std::exp(-0.125) * std::cosh(0.5), 1e-15);
  EXPECT_LT(g_star(ChargeLaw::rademacher(), {0.5, 0.125}, 1), 1.0);
  EXPECT_THROW(check_symmetric_unit_bound(ChargeLaw::three_point(2), grid, 10), InvalidArgument);
}

TEST(Bounds, K1Constant) {
  EXPECT_NEAR(k1_constant(ChargeLaw::gaussian()), 0.0, 1e-14);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(k1_constant(ChargeLaw::three_point(n)), n * n / 12.0 + 0.25, 1e-12);
}

TEST(Bounds, SmallDeltaRegimes) {
  const auto law = ChargeLaw::gaussian();
  const auto r = check_small_delta_regimes(law, 0.05, 0.5, 0.0, 1.0, 0.1, 200);
  EXPECT_TRUE(r.pass) << r.worst_margin;
}

TEST(Bounds, SuperadditivityTrivialPairAndNegativeCertificate) {
  const auto neg = check_superadditivity(ChargeLaw::gaussian(), {1.0, 0.01}, 60);
  EXPECT_FALSE(neg.pass);
  EXPECT_LT(neg.worst_margin, 0.0);
}

TEST(Bounds, SmallBetaGaussianQuadrature) {
  const auto r = check_gdb_smallbeta(ChargeLaw::gaussian(), {1.0, 1e-3}, 0.3, 0.1, 0.01, 10);
  EXPECT_TRUE(r.pass) << r.worst_margin;
}

TEST(Bounds, DensityEnvelopeGaussian) {
  const auto r = density_envelope_check(ChargeLaw::gaussian(), 200, 1.0);
  EXPECT_TRUE(r.pass);
  ASSERT_TRUE(r.fitted.count("c1"));
  EXPECT_NEAR(r.fitted.at("c1"), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-9);
}

}  // namespace
}  // namespace cpoly
