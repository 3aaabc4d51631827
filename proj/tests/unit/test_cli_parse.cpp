#include <gtest/gtest.h>

#include "cli_parse.hpp"
#include "cpoly/error.hpp"

namespace cpoly::cli {
namespace {

TEST(ParseLaw, Named) {
  EXPECT_EQ(parse_law("rademacher").kind(), LawKind::kRademacher);
  EXPECT_EQ(parse_law("gaussian").kind(), LawKind::kGaussian);
  EXPECT_EQ(parse_law("uniform").kind(), LawKind::kUniform);
  const auto t = parse_law("three_point(3)");
  EXPECT_EQ(t.kind(), LawKind::kThreePoint);
  EXPECT_EQ(t.three_point_n(), 3);
}

TEST(ParseLaw, Lattice) {
  const auto l = parse_law("lattice(-1:1/2,1:1/2)");
  EXPECT_EQ(l.kind(), LawKind::kFiniteLattice);
  EXPECT_DOUBLE_EQ(l.moment(2), 1.0);
  EXPECT_THROW(parse_law("lattice(0:1)"), InvalidArgument);
  EXPECT_THROW(parse_law("cauchy"), InvalidArgument);
  EXPECT_THROW(parse_law("three_point(x)"), InvalidArgument);
}

TEST(ParseLadder, Doubling) {
  EXPECT_EQ(parse_ladder("64:4096"), (std::vector<std::int64_t>{64, 128, 256, 512, 1024, 2048, 4096}));
  EXPECT_EQ(parse_ladder("3,5,9"), (std::vector<std::int64_t>{3, 5, 9}));
  EXPECT_EQ(parse_ladder("7"), (std::vector<std::int64_t>{7}));
  EXPECT_THROW(parse_ladder("8:4"), InvalidArgument);
  EXPECT_THROW(parse_ladder("0:4"), InvalidArgument);
  EXPECT_THROW(parse_ladder("a,b"), InvalidArgument);
}

TEST(ParseGrid, RangeAndList) {
  const auto g = parse_grid("0:3:0.1");
  ASSERT_EQ(g.size(), 31u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 3.0, 1e-12);
  EXPECT_EQ(parse_grid("1e-3,0.01"), (std::vector<double>{1e-3, 0.01}));
  EXPECT_THROW(parse_grid("0:1:0"), InvalidArgument);
  EXPECT_THROW(parse_grid("1,,2"), InvalidArgument);
}

TEST(ParseRational, Forms) {
  const auto r = parse_rational("-3/4");
  EXPECT_EQ(r.num, -3);
  EXPECT_EQ(r.den, 4);
  EXPECT_EQ(parse_rational("5").den, 1);
  EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
}

}  // namespace
}  // namespace cpoly::cli
