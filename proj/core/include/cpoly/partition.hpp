#pragma once

// Annealed partition functions
//   Z_n  = E[prod_x g(l_n(x))]     Z*_n = E[prod_x g*(l_n(x))] = M(delta)^n Z_n
// by exhaustive enumeration, by brute force over walks and charges, and by
// Monte Carlo; free-energy ladders and the critical-curve scan built on them.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpoly/charge_model.hpp"
#include "cpoly/lattice_walk.hpp"
#include "cpoly/single_site.hpp"

namespace cpoly {

struct Hamiltonian {
  double pair = 0.0;    // sum_{i<j} w_i w_j 1{S_i = S_j}
  double square = 0.0;  // sum_x (sum_i w_i 1{S_i = x})^2
};

/// Both Hamiltonians; H_square = 2 H_pair + sum_i w_i^2 is asserted in
/// debug builds. Throws InvalidArgument on length mismatch.
Hamiltonian hamiltonian(const WalkPath& path, std::span<const double> charges);

enum class Quantity { kZ, kZStar };
enum class PartitionMethod { kExactEnum, kDoubleEnum, kMonteCarlo, kConfinement };

std::string to_string(Quantity q);
std::string to_string(PartitionMethod m);

struct PartitionEstimate {
  std::int64_t n = 0;
  Quantity quantity = Quantity::kZStar;
  double log_value = 0.0;
  PartitionMethod method = PartitionMethod::kExactEnum;
  /// Standard error of log_value; 0 for exact methods.
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned shards = 1;
  /// Kish effective sample size of the weights (MC only).
  double ess = 0.0;
  bool ess_warning = false;
};

/// Exact sum over all (2d)^n walks of prod_x g*(l) (or g(l) for kZ), divided
/// by (2d)^n. Prefix shards make the result independent of `shards`.
PartitionEstimate z_exact(const ChargeLaw& law, TiltParams tilt, int dim, int n,
                          Quantity quantity = Quantity::kZStar, unsigned shards = 1,
                          double budget = kDefaultPathBudget);

/// Joint law of (H_square, charge composition) over all walks and charge
/// vectors of a finite lattice law, kept as exact integer counts. Any
/// (delta, beta) is then a finite weighted sum.
class DoubleEnumeration {
 public:
  static DoubleEnumeration build(const ChargeLaw& law, int dim, int n, double budget = kDefaultPathBudget);

  /// Z_n (tilted charge weights) or Z*_n (base weights times e^{delta sum w}).
  PartitionEstimate evaluate(TiltParams tilt, Quantity quantity = Quantity::kZ) const;

  int dim() const { return dim_; }
  int n() const { return n_; }

 private:
  const ChargeLaw* law_ = nullptr;
  int dim_ = 0;
  int n_ = 0;
  std::size_t compositions_ = 0;
  std::int64_t max_h_ = 0;
  std::vector<std::uint64_t> counts_;  // [h * compositions + composition]
  std::vector<std::vector<int>> composition_counts_;
};

/// Brute-force (E^delta x E)[exp(-beta H)] over walks and charge vectors.
PartitionEstimate z_double_enum(const ChargeLaw& law, TiltParams tilt, int dim, int n,
                                Quantity quantity = Quantity::kZ, double budget = kDefaultPathBudget);

struct McConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned shards = 1;
  /// Independent sub-streams; the estimate depends on (seed, batches) only.
  std::uint32_t batches = 64;
};

/// Mean over simple random walks of prod_x g*(l) in log space. Standard
/// error from batch means. beta = 0 is exact (constant weights).
PartitionEstimate z_mc(const ChargeLaw& law, TiltParams tilt, int dim, int n, const McConfig& mc,
                       Quantity quantity = Quantity::kZStar, const SingleSiteTable* table = nullptr);

/// Radius of the confinement ball, (n / log n)^{1/(d+2)}.
double confinement_radius(int dim, std::int64_t n);

/// Estimate of E[prod_x g*(l) ; walk stays in the ball of confinement_radius],
/// a lower bound on Z*_n. Each step is uniform over the neighbours inside
/// the ball and weighted by (allowed / 2d).
PartitionEstimate z_confined(const ChargeLaw& law, TiltParams tilt, int dim, int n, const McConfig& mc,
                             const SingleSiteTable* table = nullptr);

struct LadderRung {
  std::int64_t n = 0;
  PartitionEstimate estimate;
  double a_n = 0.0;  // (1/n) log Z*_n
  double a_n_error = 0.0;
  bool excluded = false;  // ESS below 100
  std::optional<double> confinement_a_n;
  double confinement_error = 0.0;
};

struct LadderResult {
  std::string law_id;
  TiltParams tilt;
  int dim = 2;
  std::vector<LadderRung> rungs;
  /// Slope of log Z*_n between the two largest usable rungs.
  double f_star = 0.0;
  double f_star_error = 0.0;
  /// F = F* + f(delta).
  double f = 0.0;
  double f_error = 0.0;
  double f_delta = 0.0;
  /// "superadditive" when log g* is superadditive up to the top rung, so
  /// that a_n <= F*; "increasing", "decreasing" or "none" otherwise.
  std::string monotonicity;
  /// f(delta) - 3 sigma <= F <= 3 sigma.
  bool sandwich_ok = false;
};

struct LadderOptions {
  McConfig mc;
  /// Rungs with (2d)^n at most this many walks are enumerated exactly.
  double exact_budget = 1048576.0;
  bool with_confinement = false;
};

LadderResult free_energy_ladder(const ChargeLaw& law, TiltParams tilt, int dim,
                                const std::vector<std::int64_t>& ladder, const LadderOptions& options);

struct ScanProbe {
  double beta = 0.0;
  double statistic = 0.0;
  double std_error = 0.0;
  /// "positive", "zero" (within 3 sigma) or "negative".
  std::string decision;
};

struct ScanEntry {
  double delta = 0.0;
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  double beta_hat = 0.0;
  bool resolved = true;
  std::vector<ScanProbe> probes;
};

struct CriticalScan {
  std::string law_id;
  int dim = 2;
  std::int64_t n = 0;
  std::vector<ScanEntry> entries;
  /// Brackets non-decreasing in delta (comparing both ends).
  bool monotone = false;
};

struct ScanOptions {
  McConfig mc;
  /// Stop bisecting once the bracket is narrower than tol.
  double tol = 0.01;
  /// Initial upper end is beta_max_factor * delta^2.
  double beta_max_factor = 1.0;
  int max_probes = 24;
};

/// Bisection on beta per delta; the decision statistic is the slope of
/// log Z*_n between n/2 and n, called positive when it exceeds 3 sigma.
CriticalScan critical_scan(const ChargeLaw& law, const std::vector<double>& deltas, int dim, std::int64_t n,
                           const ScanOptions& options);

struct BetaCPrediction {
  std::string regime;
  double lower = 0.0;
  double upper = 0.0;
  /// kappa_d in the small regime.
  double kappa = 0.0;
  double kappa_lower = 0.0;
};

enum class AsymptoticRegime { kSmall, kLarge };

/// Small delta: band [d^2/2 - m3 d^3/3 - eps_up, d^2/2 - m3 d^3/3 - kappa_ d^4]
/// with eps_up = kappa_2 d^4 log(1/d) (d = 2) or kappa_d d^4 (d >= 3).
/// Large delta: delta / T for lattice laws, delta^2 / (4 log delta) otherwise.
BetaCPrediction beta_c_asymptote(const ChargeLaw& law, double delta, AsymptoticRegime regime, int dim = 2);

}  // namespace cpoly
