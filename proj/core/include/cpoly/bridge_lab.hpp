#pragma once

// Bridges: P(B_n) and the constant lim n P(B_n), the one-dimensional ballot
// identity, and self-intersection local time conditioned on bridging.

#include <cstdint>
#include <string>
#include <vector>

#include "cpoly/ldp_lab.hpp"

namespace cpoly {

/// Exact P(B_n). Only the first coordinate matters; it is a lazy walk
/// (stay with probability 1 - 1/d), and the last step must go up onto a
/// new maximum, so a DP over (position, running maximum) suffices. O(n^3).
double bridge_probability_exact(int dim, std::int64_t n);

struct BridgeRung {
  std::int64_t n = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double n_times_p = 0.0;
  bool exact = false;
  /// No hit: p_hat is the one-sided 95% bound 3 / samples.
  bool one_sided = false;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

struct BridgeSeries {
  int dim = 2;
  std::vector<BridgeRung> rungs;
  /// n P(B_n) at rung i+1 over rung i.
  std::vector<double> ratios;
};

enum class BridgeMethod { kAuto, kExact, kMonteCarlo };

/// kAuto is exact up to `exact_max_n`, Monte Carlo (plain rejection with
/// early abort on the first coordinate) beyond.
BridgeSeries bridge_probability(int dim, const std::vector<std::int64_t>& ladder, BridgeMethod method,
                                const McPlan& plan, std::int64_t exact_max_n = 256);

/// d = 1: (n/2) P(B_n), whose limit is the constant C' of bridges of even
/// length 2n.
double c_prime_d1(std::int64_t n);

struct BallotRow {
  int n = 0;
  int k = 0;
  /// Paths with S_j > 0 for 0 < j <= n ending at k, and all paths ending at k.
  std::uint64_t positive = 0;
  std::uint64_t all = 0;
  bool match = false;  // n * positive == max(k, 0) * all
};

struct BallotReport {
  int n_max = 0;
  std::vector<BallotRow> rows;
  bool all_match = false;
};

/// Enumerates all 2^n one-dimensional paths for n <= n_max (<= 24).
BallotReport ballot_check(int n_max);

struct ConditionalQ {
  std::int64_t m = 0;
  double mean = 0.0;  // E[Q_m | B_m] / m
  double std_error = 0.0;
  std::uint64_t bridges = 0;
  std::uint64_t proposals = 0;
  bool exceeds = false;  // mean > lambda_d (1 + tol), d >= 3
};

struct ConditionalQSeries {
  int dim = 3;
  double lambda = 0.0;
  double tol = 0.05;
  std::vector<ConditionalQ> points;
};

/// E[Q_m | B_m] / m by rejection sampling of bridges; `plan.samples`
/// bridges per rung. Throws AcceptanceTooLow when a batch needs more than
/// `max_tries_factor * m` proposals per bridge on average.
ConditionalQSeries conditional_q_bridge(int dim, const std::vector<std::int64_t>& ladder, const McPlan& plan,
                                        double tol = 0.05, double max_tries_factor = 1000.0);

struct SiltTailPoint {
  std::int64_t m = 0;
  double threshold = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  std::uint64_t bridges = 0;
};

struct SiltTailSeries {
  double eps = 0.0;
  std::vector<SiltTailPoint> points;
};

/// d = 2: P(Q_m <= (1 + eps) lambda_2 m log m | B_m).
SiltTailSeries bridge_silt_tail(const std::vector<std::int64_t>& ladder, double eps, const McPlan& plan,
                                double max_tries_factor = 1000.0);

}  // namespace cpoly
