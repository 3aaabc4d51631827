#pragma once

// Nearest-neighbour paths on Z^d and their local-time functionals.
//
// Local times count the visits at times 1..n; the starting point S_0 is not
// a visit. With this convention a two-step path has Q_2 = 2, never 3, and
// every partition function in the library inherits it.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpoly/error.hpp"
#include "cpoly/rng.hpp"

namespace cpoly {

inline constexpr int kMaxDim = 5;

/// Lattice site; coordinates beyond the walk's dimension are zero.
using Site = std::array<std::int32_t, kMaxDim>;

/// Step codes: code c moves along axis c / 2, in the + direction for even c
/// and the - direction for odd c. The text form uses one character per step,
/// paired per axis: E/W (axis 0), N/S (axis 1), U/D (axis 2), F/B (axis 3),
/// G/H (axis 4). Lexicographic order over codes is the enumeration order.
inline constexpr std::string_view kStepAlphabet = "EWNSUDFBGH";

constexpr int step_axis(int code) { return code / 2; }
constexpr int step_sign(int code) { return (code % 2 == 0) ? 1 : -1; }

/// Default cap on exhaustive enumeration: 2^32 paths.
inline constexpr double kDefaultPathBudget = 4294967296.0;

class WalkPath {
 public:
  WalkPath(int dim, std::vector<std::uint8_t> steps);

  /// Parses a step-code string such as "EWEW".
  static WalkPath parse(int dim, std::string_view codes);

  int dim() const { return dim_; }
  std::size_t length() const { return steps_.size(); }
  std::span<const std::uint8_t> steps() const { return steps_; }

  std::string to_string() const;

  /// Positions S_0, ..., S_n.
  std::vector<Site> positions() const;
  Site endpoint() const;

  /// The path followed by `tail` started from this path's endpoint.
  WalkPath concat(const WalkPath& tail) const;

  bool operator==(const WalkPath&) const = default;

 private:
  int dim_;
  std::vector<std::uint8_t> steps_;
};

/// Site-occupation counts l_n(x) over times 1..n.
class LocalTimeField {
 public:
  LocalTimeField(int dim, std::size_t n, std::map<Site, std::int64_t> counts)
      : dim_(dim), n_(n), counts_(std::move(counts)) {}

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  const std::map<Site, std::int64_t>& counts() const { return counts_; }
  std::int64_t at(const Site& x) const;
  std::size_t range() const { return counts_.size(); }

 private:
  int dim_;
  std::size_t n_;
  std::map<Site, std::int64_t> counts_;
};

struct WalkSummary {
  std::int64_t n = 0;
  std::int64_t q_n = 0;
  std::int64_t range = 0;
  std::int64_t trim_threshold = 1;
  std::int64_t trimmed_range = 0;
  std::int64_t trimmed_time = 0;
  std::int64_t max_local_time = 0;
  bool is_bridge = false;
};

Site make_site(std::initializer_list<std::int32_t> coords);

/// Throws InvalidArgument for zero-length paths.
LocalTimeField local_times(const WalkPath& path);

WalkSummary summarize(const WalkPath& path, std::int64_t trim_threshold);

/// 0 = S_0^(1) < S_i^(1) < S_n^(1) for all 0 < i < n (first coordinate).
bool is_bridge(const WalkPath& path);

/// (2d)^n as a double.
double walk_count(int dim, int n);

/// Throws BudgetExceeded when (2d)^n exceeds `budget`.
void check_enumeration_budget(int dim, int n, double budget);

/// Calls `visit` once per path in lexicographic step-code order.
void enumerate_walks(int dim, int n, const std::function<void(const WalkPath&)>& visit,
                     double budget = kDefaultPathBudget);

/// Uniform nearest-neighbour walk.
WalkPath sample_walk(int dim, int n, Stream& stream);

struct BridgeSample {
  WalkPath path;
  std::uint64_t rejections = 0;
};

/// Plain rejection sampling of an n-step bridge. A proposal is discarded as
/// soon as its first coordinate leaves (0, inf); this does not change the law
/// of accepted paths. Throws AcceptanceTooLow after `max_tries` proposals.
BridgeSample sample_bridge(int dim, int n, Stream& stream, std::uint64_t max_tries);

/// P(S_r = 0) for r = 0..n_max. Steps are split among the axes by a
/// multinomial draw, so p^(d) is an exact convolution of the one-dimensional
/// return law (itself from a box DP) with the (d-1)-dimensional one.
std::vector<double> return_probabilities(int dim, int n_max);

/// P(S_r = 0) by direct convolution DP over the box [-r, r]^d. Memory and
/// time grow like n_max^d; `cell_budget` caps the box size.
std::vector<double> return_probabilities_box(int dim, int n_max, double cell_budget = 4.0e7);

// ---------------------------------------------------------------------------
// Kernels shared by the exact and Monte Carlo estimators.

/// Dense occupancy box for exhaustive enumeration at small n.
class OccupancyBox {
 public:
  OccupancyBox(int dim, int radius);
  int dim() const { return dim_; }
  std::size_t origin() const { return origin_; }
  std::ptrdiff_t offset(int code) const { return offsets_[static_cast<std::size_t>(code)]; }
  std::int32_t& operator[](std::size_t i) { return cells_[i]; }
  std::int32_t operator[](std::size_t i) const { return cells_[i]; }

 private:
  int dim_;
  std::size_t origin_;
  std::vector<std::ptrdiff_t> offsets_;
  std::vector<std::int32_t> cells_;
};

/// Depth-first traversal of all paths extending `prefix` to length n, in
/// lexicographic order. The visitor sees
///   push(code, prev_count) when a step lands on a site visited prev_count times,
///   pop(code, prev_count)  when that step is undone,
///   leaf()                 at every full-length path.
template <class Visitor>
void walk_tree(int dim, int n, std::span<const std::uint8_t> prefix, Visitor& visitor) {
  OccupancyBox box(dim, n);
  const int codes = 2 * dim;
  std::vector<std::size_t> at(static_cast<std::size_t>(n) + 1);
  at[0] = box.origin();
  std::size_t depth = 0;
  for (std::uint8_t c : prefix) {
    const std::size_t next = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(at[depth]) + box.offset(c));
    visitor.push(c, box[next]);
    ++box[next];
    at[++depth] = next;
  }
  if (static_cast<int>(depth) == n) {
    visitor.leaf();
    return;
  }
  // Iterative DFS; code[k] is the step being tried at depth k.
  std::vector<int> code(static_cast<std::size_t>(n) + 1, -1);
  const std::size_t base = depth;
  while (true) {
    int& c = code[depth];
    if (c >= 0) {
      const std::size_t here = at[depth + 1];
      --box[here];
      visitor.pop(c, box[here]);
    }
    ++c;
    if (c == codes) {
      c = -1;
      if (depth == base) break;
      --depth;
      continue;
    }
    const std::size_t next = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(at[depth]) + box.offset(c));
    visitor.push(c, box[next]);
    ++box[next];
    at[depth + 1] = next;
    if (static_cast<int>(depth) + 1 == n) {
      visitor.leaf();
    } else {
      ++depth;
    }
  }
}

/// Prefix number `index` in lexicographic order over `length` steps.
std::vector<std::uint8_t> walk_prefix(int dim, int length, std::uint64_t index);

/// Prefix length used to shard an enumeration into roughly `target` pieces.
int shard_prefix_length(int dim, int n, std::uint64_t target);

/// Open-addressing site -> count table for Monte Carlo walks. Sites are
/// packed into one 64-bit key (64 / d bits per coordinate), which bounds the
/// walk length: see max_length().
class SiteCounter {
 public:
  SiteCounter(int dim, std::size_t max_length);

  static std::size_t max_length(int dim);

  /// Returns to the empty state at the origin.
  void reset();
  /// Moves one step and returns the count of the new site before the visit.
  std::int64_t step(int code);

  /// Count of the neighbour reached by `code`, without moving.
  std::int64_t peek(int code) const {
    const std::uint64_t k = key_ + delta_[static_cast<std::size_t>(code)];
    const std::size_t slot = find_slot(k);
    return stamp_[slot] == generation_ ? counts_[slot] : 0;
  }

  std::uint64_t position_key() const { return key_; }
  std::int32_t coordinate(int axis) const;
  std::size_t range() const { return used_.size(); }
  /// Counts of all visited sites, in first-visit order.
  template <class F>
  void for_each_count(F&& f) const {
    for (std::size_t slot : used_) f(counts_[slot]);
  }

 private:
  std::size_t find_slot(std::uint64_t key) const;

  int dim_;
  int bits_;
  std::uint64_t origin_key_;
  std::uint64_t key_;
  std::array<std::uint64_t, 2 * kMaxDim> delta_{};
  std::size_t mask_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::int64_t> counts_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 1;
  std::vector<std::size_t> used_;
};

}  // namespace cpoly
