#include <gtest/gtest.h>

#include <cmath>

#include "cpoly/io.hpp"
#include "json.hpp"

namespace cpoly {
namespace {

using nlohmann::json;

TEST(Json, PartitionEstimateRoundTrip) {
  const auto e = z_exact(ChargeLaw::rademacher(), {0.3, 0.2}, 2, 4);
  const json j = json::parse(to_json(e));
  EXPECT_EQ(j.at("n"), 4);
  EXPECT_EQ(j.at("method"), "exact_enum");
  EXPECT_EQ(j.at("log_value").get<double>(), e.log_value);
}

TEST(Json, NonFiniteBecomesNull) {
  GreenConstants g;
  g.dim = 2;
  g.g_d = std::nan("");
  g.lambda_d = 2.0;
  const json j = json::parse(to_json(g));
  EXPECT_TRUE(j.at("G_d").is_null());
}

TEST(Json, HistogramCounts) {
  const auto h = q_histogram_exact(2, 4);
  const json j = json::parse(to_json(h));
  EXPECT_EQ(j.at("n"), 4);
  EXPECT_DOUBLE_EQ(j.at("mean").get<double>(), 5.0);
}

TEST(Json, SawCounts) {
  const json j = json::parse(saw_counts_json(2, saw_counts(2, 4)));
  EXPECT_EQ(j.at("counts"), json({1, 4, 12, 36, 100}));
}

TEST(Csv, HeadersAndRows) {
  const auto b = ballot_check(2);
  const std::string csv = to_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,k,positive,all,match");
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  EXPECT_EQ(lines, b.rows.size() + 1);
  const std::string s = saw_counts_csv(saw_counts(2, 3));
  EXPECT_EQ(s.substr(0, s.find('\n')), "n,c_n,mu_hat");
}

TEST(Version, NonEmpty) { EXPECT_FALSE(std::string(version()).empty()); }

}  // namespace
}  // namespace cpoly
