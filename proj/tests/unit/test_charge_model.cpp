#include <gtest/gtest.h>

#include <cmath>

#include "cpoly/charge_model.hpp"
#include "cpoly/error.hpp"

namespace cpoly {
namespace {

TEST(Mgf, ClosedForms) {
  EXPECT_NEAR(mgf(ChargeLaw::rademacher(), 1.0), std::cosh(1.0), 1e-15);
  EXPECT_NEAR(mgf(ChargeLaw::gaussian(), 0.7), std::exp(0.245), 1e-14);
  EXPECT_NEAR(annealed_exponent(ChargeLaw::gaussian(), 0.7), -0.245, 1e-15);
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::gaussian(), ChargeLaw::three_point(3), ChargeLaw::uniform()}) {
    EXPECT_DOUBLE_EQ(mgf(law, 0.0), 1.0) << law.id();
    EXPECT_DOUBLE_EQ(annealed_exponent(law, 0.0), 0.0) << law.id();
  }
}

TEST(Mgf, LargeDeltaDoesNotOverflow) {
  EXPECT_NEAR(log_mgf(ChargeLaw::rademacher(), 1000.0), 1000.0 - std::log(2.0), 1e-9);
  EXPECT_TRUE(std::isfinite(log_mgf(ChargeLaw::three_point(2), 800.0)));
}

TEST(TiltedMoments, KnownLaws) {
  const auto r = tilted_moments(ChargeLaw::rademacher(), 0.4);
  EXPECT_NEAR(r.mean, std::tanh(0.4), 1e-14);
  EXPECT_NEAR(r.variance, 1.0 - std::tanh(0.4) * std::tanh(0.4), 1e-14);
  const auto g = tilted_moments(ChargeLaw::gaussian(), 0.4);
  EXPECT_NEAR(g.mean, 0.4, 1e-14);
  EXPECT_NEAR(g.variance, 1.0, 1e-14);
  const auto t = tilted_moments(ChargeLaw::three_point(5), 0.0);
  EXPECT_NEAR(t.mean, 0.0, 1e-14);
  EXPECT_NEAR(t.variance, 1.0, 1e-14);
}

TEST(Moments, ThreePoint) {
  for (int n = 1; n <= 4; ++n) {
    const auto law = ChargeLaw::three_point(n);
    EXPECT_NEAR(law.moment(1), 0.0, 1e-14);
    EXPECT_NEAR(law.moment(2), 1.0, 1e-14);
    EXPECT_NEAR(law.moment(3), n, 1e-12);
    EXPECT_NEAR(law.moment(4), 3.0 * n * n, 1e-11);
  }
}

TEST(LatticeSpan, KnownLaws) {
  EXPECT_DOUBLE_EQ(lattice_span(ChargeLaw::rademacher()), 1.0);
  EXPECT_DOUBLE_EQ(lattice_span(ChargeLaw::gaussian()), 0.0);
  EXPECT_DOUBLE_EQ(lattice_span(ChargeLaw::uniform()), 0.0);
  EXPECT_DOUBLE_EQ(lattice_span(ChargeLaw::three_point(3)), 3.0);
}

TEST(FiniteLattice, ValidatesNormalization) {
  EXPECT_NO_THROW(ChargeLaw::finite_lattice({{-1, 1}, {1, 1}}, {{1, 2}, {1, 2}}));
  EXPECT_THROW(ChargeLaw::finite_lattice({{-1, 1}, {2, 1}}, {{1, 2}, {1, 2}}), InvalidArgument);
  EXPECT_THROW(ChargeLaw::finite_lattice({{-1, 1}, {1, 1}}, {{1, 2}, {1, 3}}), InvalidArgument);
  EXPECT_THROW(ChargeLaw::three_point(0), InvalidArgument);
}

TEST(OmegaSum, SecondMomentIsEll) {
  for (const auto& law : {ChargeLaw::rademacher(), ChargeLaw::three_point(2), ChargeLaw::gaussian(), ChargeLaw::uniform()}) {
    for (std::int64_t ell : {1, 5, 12}) {
      EXPECT_NEAR(omega_sum_law(law, ell).moment(2), static_cast<double>(ell), 1e-8 * ell) << law.id();
      EXPECT_NEAR(omega_sum_moment(law, ell, 2), static_cast<double>(ell), 1e-12) << law.id();
    }
  }
}

TEST(OmegaSum, RademacherFourthMoment) {
  const auto law = ChargeLaw::rademacher();
  const auto seq = omega_sum_lattice_sequence(law, 20);
  for (std::int64_t ell = 1; ell <= 20; ++ell) {
    const double expect = 3.0 * ell * ell - 2.0 * ell;
    EXPECT_NEAR(seq[static_cast<std::size_t>(ell)].moment(4), expect, 1e-9 * expect);
    EXPECT_NEAR(omega_sum_moment(law, ell, 4), expect, 1e-9 * expect);
  }
}

TEST(OmegaSum, EmptySumIsPointMass) {
  const auto w = omega_sum_law(ChargeLaw::rademacher(), 0);
  EXPECT_NEAR(w.moment(0), 1.0, 1e-15);
  EXPECT_NEAR(w.moment(2), 0.0, 1e-15);
  EXPECT_NEAR(w.moment(4), 0.0, 1e-15);
}

TEST(Sampling, TiltedRademacher) {
  Stream s(1);
  const double delta = 0.5;
  const auto xs = sample_charges(ChargeLaw::rademacher(), delta, 200000, s);
  double plus = 0;
  for (double x : xs) plus += x > 0 ? 1 : 0;
  const double p = std::exp(delta) / (2 * std::cosh(delta));
  EXPECT_NEAR(plus / xs.size(), p, 4 * std::sqrt(p * (1 - p) / xs.size()));
}

TEST(Sampling, TiltedGaussianShiftsMean) {
  Stream s(2);
  const auto xs = sample_charges(ChargeLaw::gaussian(), 0.8, 200000, s);
  double m = 0;
  for (double x : xs) m += x;
  EXPECT_NEAR(m / xs.size(), 0.8, 4.0 / std::sqrt(200000.0));
}

TEST(Sampling, ZeroTiltIsBaseLaw) {
  Stream s(3);
  const auto xs = sample_charges(ChargeLaw::three_point(2), 0.0, 200000, s);
  double m = 0, m2 = 0;
  for (double x : xs) {
    m += x;
    m2 += x * x;
  }
  EXPECT_NEAR(m / xs.size(), 0.0, 0.01);
  EXPECT_NEAR(m2 / xs.size(), 1.0, 0.03);
}

}  // namespace
}  // namespace cpoly
