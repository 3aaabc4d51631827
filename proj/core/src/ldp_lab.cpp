#include "cpoly/ldp_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "cpoly/error.hpp"
#include "cpoly/parallel.hpp"

namespace cpoly {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPrefixShards = 256;
constexpr std::uint32_t kBatches = 64;

void check_dim(int dim, int lo = 1) {
  if (dim < lo || dim > kMaxDim) {
    throw InvalidArgument("dimension must be in [" + std::to_string(lo) + ", 5]");
  }
}

std::uint64_t batch_size(std::uint64_t samples, std::uint32_t b) {
  return samples / kBatches + (b < samples % kBatches ? 1 : 0);
}

// Green function by direct summation to R plus a tail fitted on [R/2, R].
struct GreenPiece {
  double value = 0.0;
  double tail = 0.0;
  double bound = 0.0;
};

GreenPiece green_piece(int dim, const std::vector<double>& p, std::int64_t r_max) {
  const double s = 0.5 * dim;
  CompensatedSum sum;
  for (std::int64_t r = 0; r <= r_max; ++r) sum.add(p[static_cast<std::size_t>(r)]);
  std::vector<double> x;
  std::vector<double> y;
  double top = 0.0;
  for (std::int64_t r = r_max / 2; r <= r_max; r += 2) {
    const double rr = static_cast<double>(r);
    x.push_back(1.0 / rr);
    y.push_back(p[static_cast<std::size_t>(r)] * std::pow(rr, s));
    top = std::max(top, y.back());
  }
  const LinearFit fit = fit_line(x, y);
  // Even r > R only: sum_{r = R+2, R+4, ...} f(r) ~ (1/2) int_{R+1}^inf f.
  const double edge = static_cast<double>(r_max) + 1.0;
  GreenPiece g;
  g.tail = 0.5 * (fit.intercept * std::pow(edge, 1.0 - s) / (s - 1.0) + fit.slope * std::pow(edge, -s) / s);
  const double c_max = std::max(top, fit.intercept + std::abs(fit.slope) / static_cast<double>(r_max));
  g.bound = 0.5 * c_max * std::pow(edge - 2.0, 1.0 - s) / (s - 1.0);
  g.value = sum.value() + g.tail;
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

GreenConstants green_constants(int dim, double eps, std::int64_t truncation) {
  check_dim(dim);
  if (!(eps > 0)) throw InvalidArgument("green_constants: eps must be > 0");
  GreenConstants g;
  g.dim = dim;
  if (dim == 1) throw InvalidArgument("green_constants: the walk is recurrent in d = 1");
  if (dim == 2) {
    g.g_d = std::numeric_limits<double>::quiet_NaN();
    g.lambda_d = 2.0 / std::numbers::pi;
    g.converged = true;
    return g;
  }
  if (truncation < 64) throw InvalidArgument("green_constants: truncation must be >= 64");
  truncation -= truncation % 4;
  const std::vector<double> p = return_probabilities(dim, static_cast<int>(truncation));
  const GreenPiece full = green_piece(dim, p, truncation);
  const GreenPiece half = green_piece(dim, p, truncation / 2);
  g.g_d = full.value;
  g.lambda_d = 2.0 * g.g_d - 1.0;
  g.truncation = truncation;
  g.tail_estimate = full.tail;
  g.tail_bound = full.bound;
  g.g_d_half = half.value;
  g.consistency = std::abs(full.value - half.value);
  g.converged = g.consistency < eps;
  return g;
}

double lambda_constant(int dim) {
  check_dim(dim, 2);
  static std::mutex mutex;
  static std::array<double, kMaxDim + 1> cache{};
  std::lock_guard lock(mutex);
  double& v = cache[static_cast<std::size_t>(dim)];
  if (v == 0.0) v = green_constants(dim).lambda_d;
  return v;
}

// ---------------------------------------------------------------------------

namespace {

double q_ratio(int dim, std::int64_t n, double value) {
  const double nn = static_cast<double>(n);
  if (dim == 1) return value / std::pow(nn, 1.5);
  if (dim == 2) return n >= 2 ? value / (nn * std::log(nn)) : std::numeric_limits<double>::quiet_NaN();
  return value / nn;
}

ExpectedQ expected_q_from(int dim, std::int64_t n, const std::vector<double>& p) {
  CompensatedSum s;
  for (std::int64_t r = 1; r < n; ++r) s.add(static_cast<double>(n - r) * p[static_cast<std::size_t>(r)]);
  ExpectedQ e;
  e.dim = dim;
  e.n = n;
  e.value = static_cast<double>(n) + 2.0 * s.value();
  e.ratio = q_ratio(dim, n, e.value);
  return e;
}

}  // namespace

ExpectedQ expected_q(int dim, std::int64_t n) { return expected_q_series(dim, {n}).front(); }

std::vector<ExpectedQ> expected_q_series(int dim, const std::vector<std::int64_t>& ns) {
  check_dim(dim);
  std::int64_t top = 0;
  for (auto n : ns) {
    if (n < 1) throw InvalidArgument("expected_q: n must be >= 1");
    top = std::max(top, n);
  }
  const std::vector<double> p = return_probabilities(dim, static_cast<int>(top));
  std::vector<ExpectedQ> out;
  out.reserve(ns.size());
  for (auto n : ns) out.push_back(expected_q_from(dim, n, p));
  return out;
}

// ---------------------------------------------------------------------------

double QHistogram::mean() const {
  CompensatedSum s;
  for (const auto& [q, c] : counts) s.add(static_cast<double>(q) * static_cast<double>(c));
  return s.value() / total;
}

double QHistogram::variance() const {
  const double m = mean();
  CompensatedSum s;
  for (const auto& [q, c] : counts) {
    const double d = static_cast<double>(q) - m;
    s.add(d * d * static_cast<double>(c));
  }
  return s.value() / total;
}

namespace {

double mass_le(const std::map<std::int64_t, std::uint64_t>& m, std::int64_t q) {
  double s = 0.0;
  for (auto it = m.begin(); it != m.end() && it->first <= q; ++it) s += static_cast<double>(it->second);
  return s;
}

double log_laplace_of(const std::map<std::int64_t, std::uint64_t>& m, double u, double total) {
  LogSumExp acc;
  for (const auto& [q, c] : m) acc.add(std::log(static_cast<double>(c)) - u * static_cast<double>(q));
  return acc.value() - std::log(total);
}

}  // namespace

double QHistogram::prob_le(std::int64_t q) const { return mass_le(counts, q) / total; }
double QHistogram::bridge_prob_le(std::int64_t q) const { return mass_le(bridge_counts, q) / total; }
double QHistogram::log_laplace(double u) const { return log_laplace_of(counts, u, total); }
double QHistogram::bridge_log_laplace(double u) const { return log_laplace_of(bridge_counts, u, total); }

QHistogram q_histogram_exact(int dim, int n, unsigned shards, double budget) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("q histogram: n must be >= 1");
  check_enumeration_budget(dim, n, budget);
  const auto qmax = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const int plen = shard_prefix_length(dim, n, kPrefixShards);
  const auto pieces = static_cast<std::size_t>(std::llround(std::pow(2.0 * dim, plen)));

  std::vector<std::uint64_t> all(qmax + 1, 0);
  std::vector<std::uint64_t> bridges(qmax + 1, 0);
  std::mutex merge;
  parallel_for(pieces, shards, [&](std::size_t p) {
    struct Visitor {
      int n;
      std::vector<std::uint64_t> all;
      std::vector<std::uint64_t> bridges;
      std::vector<std::int64_t> q;
      std::vector<std::int64_t> x;
      std::vector<std::int64_t> lowest;   // over times 1..i
      std::vector<std::int64_t> highest;  // over times 1..i, and 0
      std::size_t depth = 0;
      void push(int code, std::int32_t prev) {
        q[depth + 1] = q[depth] + 2 * prev + 1;
        x[depth + 1] = x[depth] + (step_axis(code) == 0 ? step_sign(code) : 0);
        lowest[depth + 1] = std::min(lowest[depth], x[depth + 1]);
        highest[depth + 1] = std::max(highest[depth], x[depth + 1]);
        ++depth;
      }
      void pop(int, std::int32_t) { --depth; }
      void leaf() {
        const auto qq = static_cast<std::size_t>(q[depth]);
        ++all[qq];
        if (lowest[depth - 1] >= 1 && x[depth] > highest[depth - 1]) ++bridges[qq];
      }
    };
    const auto size = static_cast<std::size_t>(n) + 1;
    Visitor v{n,
              std::vector<std::uint64_t>(qmax + 1, 0),
              std::vector<std::uint64_t>(qmax + 1, 0),
              std::vector<std::int64_t>(size, 0),
              std::vector<std::int64_t>(size, 0),
              std::vector<std::int64_t>(size, std::numeric_limits<std::int64_t>::max()),
              std::vector<std::int64_t>(size, 0)};
    walk_tree(dim, n, walk_prefix(dim, plen, p), v);
    std::lock_guard lock(merge);
    for (std::size_t i = 0; i <= qmax; ++i) {
      all[i] += v.all[i];
      bridges[i] += v.bridges[i];
    }
  });

  QHistogram h;
  h.dim = dim;
  h.n = n;
  h.total = walk_count(dim, n);
  for (std::size_t i = 0; i <= qmax; ++i) {
    if (all[i] != 0) h.counts[static_cast<std::int64_t>(i)] = all[i];
    if (bridges[i] != 0) h.bridge_counts[static_cast<std::int64_t>(i)] = bridges[i];
  }
  return h;
}

QMoments q_moments_mc(int dim, int n, std::uint64_t samples, std::uint64_t seed, unsigned shards) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("q moments: n must be >= 1");
  if (samples < 2 * kBatches) throw InvalidArgument("q moments: need at least 128 samples");
  struct Batch {
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t count = 0;
  };
  std::vector<Batch> batches(kBatches);
  const Stream root(seed);
  parallel_for(kBatches, shards, [&](std::size_t b) {
    Stream stream = root.substream(b);
    StepSource src(stream, 2 * dim);
    SiteCounter counter(dim, static_cast<std::size_t>(n));
    Batch& out = batches[b];
    const std::uint64_t count = batch_size(samples, static_cast<std::uint32_t>(b));
    for (std::uint64_t k = 0; k < count; ++k) {
      counter.reset();
      std::int64_t q = 0;
      for (int i = 0; i < n; ++i) q += 2 * counter.step(src.next()) + 1;
      // Welford update.
      ++out.count;
      const double d = static_cast<double>(q) - out.mean;
      out.mean += d / static_cast<double>(out.count);
      out.m2 += d * (static_cast<double>(q) - out.mean);
    }
  });
  QMoments m;
  Batch all;
  std::vector<double> means;
  for (const auto& b : batches) {
    means.push_back(b.mean);
    // Chan et al. parallel merge, in batch order.
    const double total = static_cast<double>(all.count + b.count);
    const double d = b.mean - all.mean;
    all.m2 += b.m2 + d * d * static_cast<double>(all.count) * static_cast<double>(b.count) / total;
    all.mean += d * static_cast<double>(b.count) / total;
    all.count += b.count;
  }
  m.mean = all.mean;
  m.variance = all.m2 / static_cast<double>(all.count - 1);
  m.mean_se = mean_se(means).se;
  m.samples = all.count;
  return m;
}

// ---------------------------------------------------------------------------

TiltedWalk tilted_walk(SiteCounter& counter, int dim, int n, double gamma, Stream& stream) {
  const int codes = 2 * dim;
  counter.reset();
  TiltedWalk w;
  std::int64_t x = 0;
  std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
  std::int64_t highest = 0;
  const double log2d = std::log(static_cast<double>(codes));
  std::array<double, 2 * kMaxDim> weight{};
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int c = 0; c < codes; ++c) {
      const auto prev = static_cast<double>(counter.peek(c));
      weight[static_cast<std::size_t>(c)] = gamma == 0.0 ? 1.0 : std::exp(-gamma * (2.0 * prev + 1.0));
      total += weight[static_cast<std::size_t>(c)];
    }
    double pick = stream.uniform() * total;
    int c = 0;
    for (; c < codes - 1; ++c) {
      pick -= weight[static_cast<std::size_t>(c)];
      if (pick < 0) break;
    }
    w.log_rosenbluth += std::log(total) - log2d;
    w.q += 2 * counter.step(c) + 1;
    if (i > 0) {
      lowest = std::min(lowest, x);
      highest = std::max(highest, x);
    }
    if (step_axis(c) == 0) x += step_sign(c);
  }
  w.is_bridge = (n == 1 ? x > 0 : lowest >= 1 && x > highest);
  return w;
}

namespace {

struct WeightBatch {
  LogSumExp first;
  LogSumExp second;
  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  double mean_q = 0.0;
};

// log of the mean weight over all batches with a batch-means standard error.
struct WeightedMean {
  double log_mean = kNegInf;
  double log_se = 0.0;
  double ess = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

WeightedMean combine(const std::vector<WeightBatch>& batches) {
  LogSumExp first;
  LogSumExp second;
  WeightedMean w;
  for (const auto& b : batches) {
    first.merge(b.first);
    second.merge(b.second);
    w.hits += b.hits;
    w.samples += b.count;
  }
  if (w.hits == 0) return w;
  w.log_mean = first.value() - std::log(static_cast<double>(w.samples));
  std::vector<double> ratios;
  for (const auto& b : batches) {
    if (b.hits == 0) {
      ratios.push_back(0.0);
      continue;
    }
    ratios.push_back(std::exp(b.first.value() - std::log(static_cast<double>(b.count)) - w.log_mean));
  }
  w.log_se = mean_se(ratios).se;
  w.ess = std::exp(2.0 * first.value() - second.value());
  return w;
}

template <class Event>
std::vector<WeightBatch> run_tilted(int dim, int n, double gamma, std::uint64_t samples, std::uint64_t seed,
                                    unsigned shards, Event event) {
  std::vector<WeightBatch> batches(kBatches);
  const Stream root(seed);
  parallel_for(kBatches, shards, [&](std::size_t b) {
    Stream stream = root.substream(b);
    SiteCounter counter(dim, static_cast<std::size_t>(n));
    WeightBatch& out = batches[b];
    out.count = batch_size(samples, static_cast<std::uint32_t>(b));
    double qsum = 0.0;
    for (std::uint64_t k = 0; k < out.count; ++k) {
      const TiltedWalk w = tilted_walk(counter, dim, n, gamma, stream);
      qsum += static_cast<double>(w.q);
      if (!event(w)) continue;
      const double lw = event.log_weight(w, gamma);
      out.first.add(lw);
      out.second.add(2.0 * lw);
      ++out.hits;
    }
    out.mean_q = out.count > 0 ? qsum / static_cast<double>(out.count) : 0.0;
  });
  return batches;
}

struct TailEvent {
  std::int64_t q_max;
  bool bridge_only;
  bool operator()(const TiltedWalk& w) const { return w.q <= q_max && (!bridge_only || w.is_bridge); }
  double log_weight(const TiltedWalk& w, double gamma) const {
    return gamma * static_cast<double>(w.q) + w.log_rosenbluth;
  }
};

// Rosenbluth weight for E[exp(-u Q)]: with gamma = u, exp(-u Q) exp(u Q) prod(W/2d).
struct LaplaceEvent {
  bool bridge_only;
  bool operator()(const TiltedWalk& w) const { return !bridge_only || w.is_bridge; }
  double log_weight(const TiltedWalk& w, double) const { return w.log_rosenbluth; }
};

void check_mc_args(int dim, std::int64_t n, std::uint64_t samples) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (samples < kBatches) throw InvalidArgument("need at least 64 samples");
}

}  // namespace

TailEstimate q_tail(int dim, int n, std::int64_t q_max, double gamma, std::uint64_t samples, std::uint64_t seed,
                    unsigned shards, bool bridge_only) {
  check_mc_args(dim, n, samples);
  if (!(gamma >= 0)) throw InvalidArgument("q_tail: gamma must be >= 0");
  const WeightedMean w = combine(run_tilted(dim, n, gamma, samples, seed, shards, TailEvent{q_max, bridge_only}));
  TailEstimate t;
  t.gamma = gamma;
  t.samples = w.samples;
  t.hits = w.hits;
  t.ess = w.ess;
  t.zero_hits = w.hits == 0;
  if (t.zero_hits) {
    t.log_p = -std::log(static_cast<double>(samples));
    t.log_se = 0.0;
  } else {
    t.log_p = w.log_mean;
    t.log_se = w.log_se;
  }
  return t;
}

double match_tilt(int dim, int n, double target, std::uint64_t seed, std::uint64_t pilot_samples) {
  check_mc_args(dim, n, pilot_samples);
  if (target < static_cast<double>(n)) throw InvalidArgument("match_tilt: Q_n >= n, target below n");
  auto mean_q = [&](double gamma) {
    Stream stream(seed);
    SiteCounter counter(dim, static_cast<std::size_t>(n));
    double s = 0.0;
    for (std::uint64_t k = 0; k < pilot_samples; ++k) {
      s += static_cast<double>(tilted_walk(counter, dim, n, gamma, stream).q);
    }
    return s / static_cast<double>(pilot_samples);
  };
  if (mean_q(0.0) <= target) return 0.0;
  double lo = 0.0;
  double hi = 0.25;
  while (mean_q(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) return hi;
  }
  for (int it = 0; it < 30 && hi - lo > 1e-4 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_q(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

RateCurve rate_function(int dim, const std::vector<double>& ts, const std::vector<std::int64_t>& ladder,
                        RateMethod method, const McPlan& plan) {
  check_dim(dim);
  for (double t : ts) {
    if (!(t >= 1)) throw InvalidArgument("rate function: t must be >= 1");
  }
  RateCurve curve;
  curve.dim = dim;
  for (std::int64_t n : ladder) {
    if (n < 1) throw InvalidArgument("rate function: n must be >= 1");
    const double nn = static_cast<double>(n);
    if (method == RateMethod::kExact) {
      const QHistogram h = q_histogram_exact(dim, static_cast<int>(n), plan.shards);
      for (double t : ts) {
        const auto q = static_cast<std::int64_t>(std::floor(t * nn + 1e-9));
        RatePoint p;
        p.t = t;
        p.n = n;
        p.method = "exact";
        p.estimate = -std::log(h.prob_le(q)) / nn;
        const double b = h.bridge_prob_le(q);
        if (b > 0) {
          p.bridge_upper = -std::log(b) / nn;
          p.has_bridge_upper = true;
        }
        curve.points.push_back(p);
      }
      continue;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double t = ts[i];
      const auto q = static_cast<std::int64_t>(std::floor(t * nn + 1e-9));
      const std::uint64_t s = substream_seed(plan.seed, static_cast<std::uint64_t>(n) * 1024 + i);
      const double gamma = match_tilt(dim, static_cast<int>(n), std::max(nn, t * nn), s);
      const TailEstimate e = q_tail(dim, static_cast<int>(n), q, gamma, plan.samples, s + 1, plan.shards);
      RatePoint p;
      p.t = t;
      p.n = n;
      p.method = "tilted_mc";
      p.estimate = std::max(0.0, -e.log_p / nn);
      p.std_error = e.log_se / nn;
      p.lower_bounded_only = e.zero_hits;
      const TailEstimate b = q_tail(dim, static_cast<int>(n), q, gamma, plan.samples, s + 2, plan.shards, true);
      if (!b.zero_hits) {
        p.bridge_upper = -b.log_p / nn;
        p.has_bridge_upper = true;
      }
      curve.points.push_back(p);
    }
  }
  return curve;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> saw_counts(int dim, int n_max, double budget) {
  check_dim(dim);
  if (n_max < 0) throw InvalidArgument("saw_counts: n_max must be >= 0");
  // Non-reversing walks bound the search tree.
  const double work = 2.0 * dim * std::pow(2.0 * dim - 1.0, std::max(0, n_max - 1));
  if (n_max > 0 && work > budget) throw BudgetExceeded("self-avoiding walk enumeration", work, budget);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max) + 1, 0);
  counts[0] = 1;
  if (n_max == 0) return counts;
  // By symmetry count walks whose first step is code 0, then multiply by 2d;
  // shard on the second step.
  const int codes = 2 * dim;
  std::mutex merge;
  parallel_for(static_cast<std::size_t>(codes), 0, [&](std::size_t second) {
    if (n_max >= 2 && second == 1) return;  // immediate reversal
    std::vector<std::uint64_t> local(static_cast<std::size_t>(n_max) + 1, 0);
    OccupancyBox box(dim, n_max);
    std::vector<std::size_t> at(static_cast<std::size_t>(n_max) + 1);
    std::vector<int> code(static_cast<std::size_t>(n_max) + 1, -1);
    at[0] = box.origin();
    box[at[0]] = 1;
    at[1] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(at[0]) + box.offset(0));
    box[at[1]] = 1;
    code[0] = 0;
    if (second == 0) local[1] = 1;
    if (n_max >= 2) {
      at[2] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(at[1]) + box.offset(static_cast<int>(second)));
      box[at[2]] = 1;
      code[1] = static_cast<int>(second);
      local[2] = 1;
      std::size_t depth = 2;
      code[depth] = -1;
      while (depth >= 2) {
        int& c = code[depth];
        ++c;
        if (c == (code[depth - 1] ^ 1)) ++c;
        if (c >= codes || static_cast<int>(depth) == n_max) {
          c = -1;
          box[at[depth]] = 0;
          --depth;
          continue;
        }
        const std::size_t next = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(at[depth]) + box.offset(c));
        if (box[next] != 0) continue;
        box[next] = 1;
        at[depth + 1] = next;
        ++local[depth + 1];
        ++depth;
        code[depth] = -1;
      }
    }
    std::lock_guard lock(merge);
    for (std::size_t i = 1; i < local.size(); ++i) counts[i] += local[i];
  });
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] *= static_cast<std::uint64_t>(codes);
  return counts;
}

// ---------------------------------------------------------------------------

WsawRung wsaw_rung_mc(int dim, std::int64_t n, double u, const McPlan& plan, bool bridge_only) {
  check_mc_args(dim, n, plan.samples);
  if (!(u >= 0)) throw InvalidArgument("wsaw: u must be >= 0");
  WsawRung r;
  r.n = n;
  const WeightedMean w =
      combine(run_tilted(dim, static_cast<int>(n), u, plan.samples, plan.seed, plan.shards, LaplaceEvent{bridge_only}));
  if (w.hits == 0) throw EssCollapse("wsaw: no bridge among the samples at n = " + std::to_string(n));
  r.a_n = -w.log_mean / static_cast<double>(n);
  r.std_error = w.log_se / static_cast<double>(n);
  r.ess = w.ess;
  return r;
}

WsawResult wsaw_free_energy(int dim, double u, const std::vector<std::int64_t>& ladder, const WsawOptions& options) {
  check_dim(dim);
  if (!(u >= 0)) throw InvalidArgument("wsaw: u must be >= 0");
  if (ladder.empty()) throw InvalidArgument("wsaw: empty ladder");
  WsawResult res;
  res.dim = dim;
  res.u = u;
  for (std::int64_t n : ladder) {
    if (n < 1) throw InvalidArgument("wsaw: n must be >= 1");
    const bool with_bridge = n <= options.bridge_max_n;
    if (n <= options.exact_max_n) {
      const QHistogram h = q_histogram_exact(dim, static_cast<int>(n), options.plan.shards);
      const double nn = static_cast<double>(n);
      res.rungs.push_back({n, -h.log_laplace(u) / nn, 0.0, true, h.total});
      if (with_bridge) res.bridge_rungs.push_back({n, -h.bridge_log_laplace(u) / nn, 0.0, true, h.total});
      continue;
    }
    McPlan plan = options.plan;
    plan.seed = substream_seed(options.plan.seed, static_cast<std::uint64_t>(n));
    res.rungs.push_back(wsaw_rung_mc(dim, n, u, plan));
    if (with_bridge) {
      plan.seed = substream_seed(options.plan.seed ^ 0xb1d6e5ULL, static_cast<std::uint64_t>(n));
      res.bridge_rungs.push_back(wsaw_rung_mc(dim, n, u, plan, true));
    }
  }
  const auto best_lower =
      std::max_element(res.rungs.begin(), res.rungs.end(), [](const auto& a, const auto& b) { return a.a_n < b.a_n; });
  res.lower = best_lower->a_n;
  res.lower_error = best_lower->std_error;
  if (!res.bridge_rungs.empty()) {
    const auto best_upper = std::min_element(res.bridge_rungs.begin(), res.bridge_rungs.end(),
                                             [](const auto& a, const auto& b) { return a.a_n < b.a_n; });
    res.upper = best_upper->a_n;
    res.upper_error = best_upper->std_error;
    res.has_upper = true;
    for (const auto& lo : res.rungs) {
      for (const auto& hi : res.bridge_rungs) {
        if (lo.a_n - hi.a_n > 3.0 * std::hypot(lo.std_error, hi.std_error) + 1e-12) res.consistent = false;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

VaradhanReport varadhan_residual(const QHistogram& hist, const std::vector<double>& us) {
  VaradhanReport rep;
  const double n = static_cast<double>(hist.n);
  for (double u : us) {
    if (!(u >= 0)) throw InvalidArgument("varadhan: u must be >= 0");
    const double lhs = hist.log_laplace(u) / n;
    double sup = kNegInf;
    double cumulative = 0.0;
    for (const auto& [q, c] : hist.counts) {
      cumulative += static_cast<double>(c);
      sup = std::max(sup, (-u * static_cast<double>(q) + std::log(cumulative / hist.total)) / n);
    }
    const double r = std::abs(lhs - sup);
    rep.residuals.push_back(r);
    if (r >= rep.max_residual) {
      rep.max_residual = r;
      rep.argmax_u = u;
    }
  }
  return rep;
}

VaradhanReport varadhan_residual(const std::vector<double>& us, const std::vector<double>& a_n,
                                 const std::vector<double>& a_n_error, const RateCurve& curve) {
  if (us.size() != a_n.size() || (!a_n_error.empty() && a_n_error.size() != us.size())) {
    throw InvalidArgument("varadhan: u grid and a_n values differ in length");
  }
  if (curve.points.empty()) throw InvalidArgument("varadhan: empty rate curve");
  const std::int64_t n = curve.points.front().n;
  for (const auto& p : curve.points) {
    if (p.n != n) throw InvalidArgument("varadhan: rate curve mixes several n");
  }
  VaradhanReport rep;
  for (std::size_t i = 0; i < us.size(); ++i) {
    double sup = kNegInf;
    for (const auto& p : curve.points) sup = std::max(sup, -p.t * us[i] - p.estimate);
    const double r = std::abs(-a_n[i] - sup);
    rep.residuals.push_back(r);
    if (r >= rep.max_residual) {
      rep.max_residual = r;
      rep.argmax_u = us[i];
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct RangeCounts {
  std::vector<double> range_hits;
  std::vector<double> trimmed_hits;
};

}  // namespace

RangeProbe range_ld_probe(int dim, std::int64_t n, const std::vector<double>& ss, std::int64_t trim_threshold,
                          double theta, const McPlan& plan, double exact_budget) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("range probe: n must be >= 1");
  for (double s : ss) {
    if (!(s >= 0 && s <= 1)) throw InvalidArgument("range probe: s must lie in [0, 1]");
  }
  const bool trimmed = trim_threshold > 0;
  if (trimmed && !(theta > 0 && theta <= 1)) throw InvalidArgument("range probe: theta must lie in (0, 1]");
  RangeProbe probe;
  probe.dim = dim;
  probe.n = n;
  probe.trim_threshold = trim_threshold;
  probe.theta = theta;
  const double nn = static_cast<double>(n);
  const std::int64_t a = trimmed ? trim_threshold : 0;

  auto range_event = [&](double s, std::int64_t range) { return static_cast<double>(range) >= s * nn - 1e-9; };
  auto trimmed_event = [&](double s, std::int64_t tr, std::int64_t tt) {
    return static_cast<double>(tr) >= s * theta * nn - 1e-9 && static_cast<double>(tt) <= theta * nn + 1e-9;
  };

  if (walk_count(dim, static_cast<int>(std::min<std::int64_t>(n, 1000))) <= exact_budget) {
    probe.method = "exact";
    probe.samples = static_cast<std::uint64_t>(walk_count(dim, static_cast<int>(n)));
    // Joint histogram of (range, trimmed range, trimmed time).
    const auto size = static_cast<std::size_t>(n) + 1;
    std::vector<std::uint64_t> joint(size * size * size, 0);
    const int plen = shard_prefix_length(dim, static_cast<int>(n), kPrefixShards);
    const auto pieces = static_cast<std::size_t>(std::llround(std::pow(2.0 * dim, plen)));
    std::mutex merge;
    parallel_for(pieces, plan.shards, [&](std::size_t p) {
      struct Visitor {
        std::int64_t a;
        std::size_t size;
        std::vector<std::uint64_t> joint;
        std::int64_t range = 0;
        std::int64_t tr = 0;
        std::int64_t tt = 0;
        void push(int, std::int32_t prev) {
          if (prev == 0) ++range;
          if (prev + 1 <= a) {
            ++tt;
            if (prev == 0) ++tr;
          } else if (a > 0 && prev == a) {
            --tr;
            tt -= a;
          }
        }
        void pop(int, std::int32_t prev) {
          if (prev == 0) --range;
          if (prev + 1 <= a) {
            --tt;
            if (prev == 0) --tr;
          } else if (a > 0 && prev == a) {
            ++tr;
            tt += a;
          }
        }
        void leaf() {
          ++joint[(static_cast<std::size_t>(range) * size + static_cast<std::size_t>(tr)) * size +
                  static_cast<std::size_t>(tt)];
        }
      };
      Visitor v{a, size, std::vector<std::uint64_t>(size * size * size, 0)};
      walk_tree(dim, static_cast<int>(n), walk_prefix(dim, plen, p), v);
      std::lock_guard lock(merge);
      for (std::size_t i = 0; i < joint.size(); ++i) joint[i] += v.joint[i];
    });
    const double total = walk_count(dim, static_cast<int>(n));
    for (double s : ss) {
      double hit = 0.0;
      double thit = 0.0;
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t tr = 0; tr < size; ++tr) {
          for (std::size_t tt = 0; tt < size; ++tt) {
            const auto c = static_cast<double>(joint[(r * size + tr) * size + tt]);
            if (c == 0) continue;
            if (range_event(s, static_cast<std::int64_t>(r))) hit += c;
            if (trimmed && trimmed_event(s, static_cast<std::int64_t>(tr), static_cast<std::int64_t>(tt))) thit += c;
          }
        }
      }
      RangePoint pt;
      pt.s = s;
      pt.probability = hit / total;
      pt.exponent = -std::log(pt.probability) / nn;
      if (trimmed) {
        pt.trimmed_probability = thit / total;
        pt.trimmed_exponent = thit > 0 ? -std::log(pt.trimmed_probability) / nn : std::log(total) / nn;
      }
      probe.points.push_back(pt);
    }
    return probe;
  }

  check_mc_args(dim, n, plan.samples);
  probe.method = "mc";
  probe.samples = plan.samples;
  std::vector<RangeCounts> batches(kBatches, RangeCounts{std::vector<double>(ss.size(), 0.0),
                                                         std::vector<double>(ss.size(), 0.0)});
  std::vector<std::uint64_t> sizes(kBatches);
  const Stream root(plan.seed);
  parallel_for(kBatches, plan.shards, [&](std::size_t b) {
    Stream stream = root.substream(b);
    StepSource src(stream, 2 * dim);
    SiteCounter counter(dim, static_cast<std::size_t>(n));
    sizes[b] = batch_size(plan.samples, static_cast<std::uint32_t>(b));
    for (std::uint64_t k = 0; k < sizes[b]; ++k) {
      counter.reset();
      for (std::int64_t i = 0; i < n; ++i) counter.step(src.next());
      std::int64_t tr = 0;
      std::int64_t tt = 0;
      if (trimmed) {
        counter.for_each_count([&](std::int64_t c) {
          if (c <= a) {
            ++tr;
            tt += c;
          }
        });
      }
      const auto range = static_cast<std::int64_t>(counter.range());
      for (std::size_t j = 0; j < ss.size(); ++j) {
        if (range_event(ss[j], range)) batches[b].range_hits[j] += 1;
        if (trimmed && trimmed_event(ss[j], tr, tt)) batches[b].trimmed_hits[j] += 1;
      }
    }
  });
  const double total = static_cast<double>(plan.samples);
  for (std::size_t j = 0; j < ss.size(); ++j) {
    double hit = 0.0;
    double thit = 0.0;
    std::vector<double> fractions;
    for (std::size_t b = 0; b < kBatches; ++b) {
      hit += batches[b].range_hits[j];
      thit += batches[b].trimmed_hits[j];
      fractions.push_back(batches[b].range_hits[j] / static_cast<double>(sizes[b]));
    }
    RangePoint pt;
    pt.s = ss[j];
    pt.probability = hit / total;
    if (hit > 0) {
      pt.exponent = -std::log(pt.probability) / nn;
      pt.std_error = mean_se(fractions).se / pt.probability / nn;
    } else {
      // Fewer than one hit in `samples`: the exponent is at least log(samples)/n.
      pt.one_sided = true;
      pt.exponent = std::log(total) / nn;
    }
    if (trimmed) {
      pt.trimmed_probability = thit / total;
      pt.trimmed_exponent = thit > 0 ? -std::log(pt.trimmed_probability) / nn : std::log(total) / nn;
      if (thit == 0) pt.one_sided = true;
    }
    probe.points.push_back(pt);
  }
  return probe;
}

// ---------------------------------------------------------------------------

ExpansionProbe expansion_probe(int dim, const std::vector<double>& us, double m_factor, std::int64_t max_n,
                               const McPlan& plan) {
  check_dim(dim, 3);
  if (us.empty()) throw InvalidArgument("expansion probe: empty u grid");
  if (!(m_factor > 0) || max_n < 1) throw InvalidArgument("expansion probe: bad m_factor or max_n");
  std::vector<double> sorted = us;
  std::sort(sorted.begin(), sorted.end());
  const double lambda = lambda_constant(dim);
  ExpansionProbe probe;
  probe.dim = dim;
  probe.us = sorted;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = sorted[i];
    if (!(u > 0)) throw InvalidArgument("expansion probe: u must be > 0");
    const auto n = std::min<std::int64_t>(max_n, static_cast<std::int64_t>(std::ceil(m_factor / u)));
    McPlan p = plan;
    p.seed = substream_seed(plan.seed, i);
    const WsawRung r = wsaw_rung_mc(dim, n, u, p);
    probe.gap.push_back(lambda * u - r.a_n);
    probe.gap_error.push_back(r.std_error);
    probe.n_used.push_back(n);
  }
  probe.positive = std::all_of(probe.gap.begin(), probe.gap.end(), [](double g) { return g > 0; });
  probe.increasing = true;
  for (std::size_t i = 1; i < probe.gap.size(); ++i) {
    if (probe.gap[i] < probe.gap[i - 1] - 3.0 * std::hypot(probe.gap_error[i], probe.gap_error[i - 1])) {
      probe.increasing = false;
    }
  }
  if (probe.positive && probe.gap.size() >= 2) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
    for (std::size_t i = 0; i < probe.gap.size(); ++i) {
      x.push_back(std::log(sorted[i]));
      y.push_back(std::log(probe.gap[i]));
      sigma.push_back(std::max(probe.gap_error[i] / probe.gap[i], 1e-12));
    }
    const LinearFit fit = probe.gap.size() > 2 ? fit_line(x, y, sigma) : fit_line(x, y);
    probe.exponent = fit.slope;
    probe.exponent_se = fit.slope_se;
    probe.prefactor = std::exp(fit.intercept);
    probe.prefactor_se = probe.prefactor * fit.intercept_se;
  }
  return probe;
}

}  // namespace cpoly
