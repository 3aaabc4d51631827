#pragma once

// Large deviations of the self-intersection local time Q_n: Green-function
// constants, E[Q_n], exact and sampled laws of Q_n, the rate function I(t),
// weakly self-avoiding walk, self-avoiding walk counts and range probes.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpoly/lattice_walk.hpp"
#include "cpoly/numeric.hpp"

namespace cpoly {

struct GreenConstants {
  int dim = 3;
  /// G_d = sum_r P(S_r = 0); NaN for d = 2.
  double g_d = 0.0;
  double lambda_d = 0.0;
  std::int64_t truncation = 0;
  /// Fitted tail sum_{r > R} p_r and a conservative bound on it.
  double tail_estimate = 0.0;
  double tail_bound = 0.0;
  /// G_d from half the truncation; |g_d - g_d_half| is the consistency gap.
  double g_d_half = 0.0;
  double consistency = 0.0;
  bool converged = false;
};

/// d = 2 returns lambda_2 = 2/pi. For d >= 3 sums p_r up to `truncation` and
/// adds a tail p_r ~ C r^{-d/2} (1 + a/r) fitted on [R/2, R]; `converged`
/// when two truncation levels agree to eps. Throws for d = 1.
GreenConstants green_constants(int dim, double eps = 1e-4, std::int64_t truncation = 1 << 14);

/// lambda_d, cached per dimension.
double lambda_constant(int dim);

struct ExpectedQ {
  int dim = 2;
  std::int64_t n = 0;
  double value = 0.0;
  /// E[Q_n] / (n log n) for d = 2, E[Q_n] / n for d >= 3, E[Q_n] / n^{3/2} for d = 1.
  double ratio = 0.0;
};

/// E[Q_n] = n + 2 sum_{r<n} (n - r) p_r.
ExpectedQ expected_q(int dim, std::int64_t n);
std::vector<ExpectedQ> expected_q_series(int dim, const std::vector<std::int64_t>& ns);

/// Exact law of Q_n (and of Q_n on the bridge event) over all (2d)^n walks.
struct QHistogram {
  int dim = 2;
  int n = 0;
  std::map<std::int64_t, std::uint64_t> counts;
  std::map<std::int64_t, std::uint64_t> bridge_counts;
  double total = 0.0;  // (2d)^n

  double mean() const;
  double variance() const;
  /// P(Q_n <= q), and P(Q_n <= q, B_n).
  double prob_le(std::int64_t q) const;
  double bridge_prob_le(std::int64_t q) const;
  /// log E[exp(-u Q_n)], and the same on the bridge event.
  double log_laplace(double u) const;
  double bridge_log_laplace(double u) const;
};

QHistogram q_histogram_exact(int dim, int n, unsigned shards = 1, double budget = kDefaultPathBudget);

struct QMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  std::uint64_t samples = 0;
};

/// Plain Monte Carlo moments of Q_n (batched sub-streams).
QMoments q_moments_mc(int dim, int n, std::uint64_t samples, std::uint64_t seed, unsigned shards = 1);

struct TailEstimate {
  double log_p = 0.0;
  /// Standard error of log_p (delta method from batch means).
  double log_se = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double gamma = 0.0;
  double ess = 0.0;
  /// No sample hit the event; log_p is then only an upper bound proxy.
  bool zero_hits = false;
};

/// Sequentially tilted walk: each step picks a neighbour with probability
/// proportional to exp(-gamma dQ) where dQ = 2 l(x) + 1 is the increase of
/// Q. Returns Q_n and log prod_i (W_i / 2d), W_i the normalizer at step i.
struct TiltedWalk {
  std::int64_t q = 0;
  double log_rosenbluth = 0.0;
  bool is_bridge = false;
};
TiltedWalk tilted_walk(SiteCounter& counter, int dim, int n, double gamma, Stream& stream);

/// P(Q_n <= q_max) (optionally on the bridge event) by importance sampling
/// with the tilted walk; weight exp(gamma Q_n) prod (W_i / 2d). gamma = 0 is
/// plain Monte Carlo.
TailEstimate q_tail(int dim, int n, std::int64_t q_max, double gamma, std::uint64_t samples,
                    std::uint64_t seed, unsigned shards = 1, bool bridge_only = false);

/// gamma whose tilted walk has mean Q_n close to `target` (bisection on pilot runs).
double match_tilt(int dim, int n, double target, std::uint64_t seed, std::uint64_t pilot_samples = 2000);

enum class RateMethod { kExact, kTiltedMc };

struct RatePoint {
  double t = 0.0;
  std::int64_t n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::string method;
  bool lower_bounded_only = false;
  /// -(1/n) log P(Q_n <= tn, B_n) >= I(t) when available.
  double bridge_upper = 0.0;
  bool has_bridge_upper = false;
};

struct RateCurve {
  std::string kind = "I_of_t";
  int dim = 2;
  std::vector<RatePoint> points;
};

struct McPlan {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned shards = 1;
};

RateCurve rate_function(int dim, const std::vector<double>& ts, const std::vector<std::int64_t>& ladder,
                        RateMethod method, const McPlan& plan = {});

/// Number of n-step self-avoiding walks for n = 0..n_max (backtracking with
/// immediate-reversal pruning).
std::vector<std::uint64_t> saw_counts(int dim, int n_max, double budget = 1e12);

struct WsawRung {
  std::int64_t n = 0;
  double a_n = 0.0;  // -(1/n) log E[exp(-u Q_n)]
  double std_error = 0.0;
  bool exact = false;
  double ess = 0.0;
};

struct WsawResult {
  int dim = 2;
  double u = 0.0;
  /// a_n: n a_n is superadditive, so every a_n is a lower bound on f_wsaw.
  std::vector<WsawRung> rungs;
  /// -(1/n) log E[exp(-u Q_n); B_n]: upper bounds on f_wsaw.
  std::vector<WsawRung> bridge_rungs;
  double lower = 0.0;
  double lower_error = 0.0;
  double upper = 0.0;
  double upper_error = 0.0;
  bool has_upper = false;
  /// Every lower bound <= every upper bound within 3 sigma.
  bool consistent = true;
};

struct WsawOptions {
  McPlan plan;
  /// Rungs with n <= exact_max_n are evaluated from exact histograms.
  int exact_max_n = 0;
  /// Largest rung for which bridge upper bounds are sampled.
  std::int64_t bridge_max_n = 0;
};

WsawResult wsaw_free_energy(int dim, double u, const std::vector<std::int64_t>& ladder,
                            const WsawOptions& options);

/// -(1/n) log E[exp(-u Q_n)] by Rosenbluth sampling (tilted walk at gamma = u).
WsawRung wsaw_rung_mc(int dim, std::int64_t n, double u, const McPlan& plan, bool bridge_only = false);

struct VaradhanReport {
  double max_residual = 0.0;
  double argmax_u = 0.0;
  std::vector<double> residuals;
};

/// |(1/n) log E e^{-uQ_n} - sup_t(-t u - I_n(t))| from one exact histogram,
/// sup over the integer grid t = q/n.
VaradhanReport varadhan_residual(const QHistogram& hist, const std::vector<double>& us);

/// The same from separately estimated curves: a_n(u) values and points of I_n.
VaradhanReport varadhan_residual(const std::vector<double>& us, const std::vector<double>& a_n,
                                 const std::vector<double>& a_n_error, const RateCurve& curve);

struct RangePoint {
  double s = 0.0;
  double probability = 0.0;
  double exponent = 0.0;  // -(1/n) log P
  double std_error = 0.0;
  bool one_sided = false;
  /// Trimmed event P(|R^-_{n,A}| >= s theta n, gamma^-_{n,A} <= theta n).
  double trimmed_probability = -1.0;
  double trimmed_exponent = 0.0;
};

struct RangeProbe {
  int dim = 2;
  std::int64_t n = 0;
  std::int64_t trim_threshold = 0;
  double theta = 0.0;
  std::uint64_t samples = 0;
  std::string method;
  std::vector<RangePoint> points;
  std::string note = "conjecture evidence";
};

/// Tail probabilities of the range R_n and, when trim_threshold > 0, of the
/// trimmed range. Exact enumeration when (2d)^n <= exact_budget, otherwise MC.
RangeProbe range_ld_probe(int dim, std::int64_t n, const std::vector<double>& ss, std::int64_t trim_threshold,
                          double theta, const McPlan& plan, double exact_budget = 4194304.0);

struct ExpansionProbe {
  int dim = 3;
  std::vector<double> us;
  std::vector<double> gap;  // lambda_d u - a_n(u)
  std::vector<double> gap_error;
  std::vector<std::int64_t> n_used;
  bool positive = false;
  bool increasing = false;
  /// Fit log gap = log a + p log u.
  double exponent = 0.0;
  double exponent_se = 0.0;
  double prefactor = 0.0;
  double prefactor_se = 0.0;
  std::string note = "conjecture evidence";
};

/// lambda_d u - f_wsaw(u) over a u grid, with f_wsaw estimated by a_n at
/// n = m_factor / u (capped at max_n).
ExpansionProbe expansion_probe(int dim, const std::vector<double>& us, double m_factor, std::int64_t max_n,
                               const McPlan& plan);

}  // namespace cpoly
