#include "cpoly/bridge_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "cpoly/error.hpp"
#include "cpoly/parallel.hpp"

namespace cpoly {

namespace {

constexpr std::uint32_t kBatches = 64;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be in [1, 5]");
}

std::uint64_t batch_size(std::uint64_t samples, std::uint32_t b) {
  return samples / kBatches + (b < samples % kBatches ? 1 : 0);
}

// One proposal of the first coordinate; false as soon as it leaves (0, inf)
// or when the endpoint is not a strict new maximum.
bool propose_bridge(int n, StepSource& src) {
  std::int64_t x = 0;
  std::int64_t highest = 0;
  for (int i = 0; i < n; ++i) {
    const int c = src.next();
    if (step_axis(c) == 0) x += step_sign(c);
    if (x <= 0) return false;
    if (i + 1 < n) highest = std::max(highest, x);
  }
  return x > highest;
}

// Rejection sampling of bridges that also tracks Q_m; calls f(q) for each
// accepted bridge and returns the number of proposals.
template <class F>
std::uint64_t sample_bridges_q(int dim, int m, std::uint64_t count, Stream& stream, std::uint64_t max_tries, F&& f) {
  StepSource src(stream, 2 * dim);
  SiteCounter counter(dim, static_cast<std::size_t>(m));
  std::uint64_t tries = 0;
  std::uint64_t got = 0;
  while (got < count) {
    if (tries >= max_tries) throw AcceptanceTooLow(tries, got);
    ++tries;
    counter.reset();
    std::int64_t x = 0;
    std::int64_t highest = 0;
    std::int64_t q = 0;
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      const int c = src.next();
      if (step_axis(c) == 0) x += step_sign(c);
      if (x <= 0) {
        ok = false;
        break;
      }
      if (i + 1 < m) highest = std::max(highest, x);
      q += 2 * counter.step(c) + 1;
    }
    if (!ok || x <= highest) continue;
    f(q);
    ++got;
  }
  return tries;
}

}  // namespace

double bridge_probability_exact(int dim, std::int64_t n) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("bridge probability: n must be >= 1");
  const double up = 1.0 / (2.0 * dim);
  const double stay = 1.0 - 1.0 / dim;
  if (n == 1) return up;
  // cur[M * w + g]: first coordinate x = M - g >= 1, running maximum M.
  const auto w = static_cast<std::size_t>(n) + 1;
  std::vector<double> cur(w * w, 0.0);
  std::vector<double> nxt(w * w, 0.0);
  cur[1 * w + 0] = up;
  for (std::int64_t t = 2; t <= n - 1; ++t) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t m = 1; m < static_cast<std::size_t>(t); ++m) {
      for (std::size_t g = 0; g < m; ++g) {
        const double p = cur[m * w + g];
        if (p == 0.0) continue;
        if (g == 0) {
          nxt[(m + 1) * w] += up * p;
        } else {
          nxt[m * w + g - 1] += up * p;
        }
        nxt[m * w + g] += stay * p;
        if (g + 1 < m) nxt[m * w + g + 1] += up * p;
      }
    }
    std::swap(cur, nxt);
  }
  double at_max = 0.0;
  for (std::size_t m = 1; m < w; ++m) at_max += cur[m * w];
  return up * at_max;
}

BridgeSeries bridge_probability(int dim, const std::vector<std::int64_t>& ladder, BridgeMethod method,
                                const McPlan& plan, std::int64_t exact_max_n) {
  check_dim(dim);
  BridgeSeries s;
  s.dim = dim;
  for (std::int64_t n : ladder) {
    if (n < 1) throw InvalidArgument("bridge probability: n must be >= 1");
    BridgeRung r;
    r.n = n;
    const bool exact = method == BridgeMethod::kExact || (method == BridgeMethod::kAuto && n <= exact_max_n);
    if (exact) {
      r.p_hat = bridge_probability_exact(dim, n);
      r.exact = true;
    } else {
      if (plan.samples < kBatches) throw InvalidArgument("bridge probability: need at least 64 samples");
      std::vector<std::uint64_t> hits(kBatches, 0);
      const Stream root(substream_seed(plan.seed, static_cast<std::uint64_t>(n)));
      parallel_for(kBatches, plan.shards, [&](std::size_t b) {
        Stream stream = root.substream(b);
        StepSource src(stream, 2 * dim);
        const std::uint64_t count = batch_size(plan.samples, static_cast<std::uint32_t>(b));
        for (std::uint64_t k = 0; k < count; ++k) {
          if (propose_bridge(static_cast<int>(n), src)) ++hits[b];
        }
      });
      for (auto h : hits) r.hits += h;
      r.samples = plan.samples;
      const double total = static_cast<double>(plan.samples);
      if (r.hits == 0) {
        r.one_sided = true;
        r.p_hat = 3.0 / total;
      } else {
        r.p_hat = static_cast<double>(r.hits) / total;
        r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / total);
      }
    }
    r.n_times_p = static_cast<double>(n) * r.p_hat;
    s.rungs.push_back(r);
  }
  for (std::size_t i = 1; i < s.rungs.size(); ++i) s.ratios.push_back(s.rungs[i].n_times_p / s.rungs[i - 1].n_times_p);
  return s;
}

double c_prime_d1(std::int64_t n) { return 0.5 * static_cast<double>(n) * bridge_probability_exact(1, n); }

BallotReport ballot_check(int n_max) {
  if (n_max < 1 || n_max > 24) throw InvalidArgument("ballot check: n_max must be in [1, 24]");
  BallotReport rep;
  rep.n_max = n_max;
  rep.all_match = true;
  for (int n = 1; n <= n_max; ++n) {
    const auto width = static_cast<std::size_t>(2 * n + 1);
    std::vector<std::uint64_t> all(width, 0);
    std::vector<std::uint64_t> positive(width, 0);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      // Bit i set: step i + 1 goes up.
      const int end = 2 * std::popcount(mask) - n;
      ++all[static_cast<std::size_t>(end + n)];
      int s = 0;
      bool pos = true;
      for (int i = 0; i < n && pos; ++i) {
        s += (mask >> i) & 1u ? 1 : -1;
        pos = s > 0;
      }
      if (pos) ++positive[static_cast<std::size_t>(end + n)];
    }
    for (int k = -n; k <= n; ++k) {
      const auto idx = static_cast<std::size_t>(k + n);
      if (all[idx] == 0) continue;
      BallotRow row;
      row.n = n;
      row.k = k;
      row.positive = positive[idx];
      row.all = all[idx];
      row.match = static_cast<std::uint64_t>(n) * row.positive == static_cast<std::uint64_t>(std::max(k, 0)) * row.all;
      rep.all_match = rep.all_match && row.match;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

ConditionalQSeries conditional_q_bridge(int dim, const std::vector<std::int64_t>& ladder, const McPlan& plan,
                                        double tol, double max_tries_factor) {
  check_dim(dim);
  if (plan.samples < kBatches) throw InvalidArgument("conditional Q: need at least 64 bridges");
  ConditionalQSeries s;
  s.dim = dim;
  s.tol = tol;
  s.lambda = dim >= 2 ? lambda_constant(dim) : 0.0;
  for (std::int64_t m : ladder) {
    if (m < 1) throw InvalidArgument("conditional Q: m must be >= 1");
    std::vector<double> sums(kBatches, 0.0);
    std::vector<std::uint64_t> tries(kBatches, 0);
    const Stream root(substream_seed(plan.seed, static_cast<std::uint64_t>(m)));
    parallel_for(kBatches, plan.shards, [&](std::size_t b) {
      Stream stream = root.substream(b);
      const std::uint64_t count = batch_size(plan.samples, static_cast<std::uint32_t>(b));
      const auto cap = static_cast<std::uint64_t>(max_tries_factor * static_cast<double>(m) * static_cast<double>(count));
      tries[b] = sample_bridges_q(dim, static_cast<int>(m), count, stream, std::max<std::uint64_t>(cap, 1000),
                                  [&](std::int64_t q) { sums[b] += static_cast<double>(q); });
    });
    ConditionalQ pt;
    pt.m = m;
    std::vector<double> means;
    double total = 0.0;
    for (std::size_t b = 0; b < kBatches; ++b) {
      const auto count = static_cast<double>(batch_size(plan.samples, static_cast<std::uint32_t>(b)));
      means.push_back(sums[b] / count / static_cast<double>(m));
      total += sums[b];
      pt.proposals += tries[b];
    }
    pt.bridges = plan.samples;
    pt.mean = total / static_cast<double>(plan.samples) / static_cast<double>(m);
    pt.std_error = mean_se(means).se;
    pt.exceeds = dim >= 3 && pt.mean > s.lambda * (1.0 + tol);
    s.points.push_back(pt);
  }
  return s;
}

SiltTailSeries bridge_silt_tail(const std::vector<std::int64_t>& ladder, double eps, const McPlan& plan,
                                double max_tries_factor) {
  if (plan.samples < kBatches) throw InvalidArgument("bridge SILT tail: need at least 64 bridges");
  if (!(eps > -1)) throw InvalidArgument("bridge SILT tail: eps must be > -1");
  SiltTailSeries s;
  s.eps = eps;
  const double lambda = 2.0 / std::numbers::pi;
  for (std::int64_t m : ladder) {
    if (m < 2) throw InvalidArgument("bridge SILT tail: m must be >= 2");
    const double mm = static_cast<double>(m);
    const double threshold = (1.0 + eps) * lambda * mm * std::log(mm);
    std::vector<std::uint64_t> hits(kBatches, 0);
    const Stream root(substream_seed(plan.seed, static_cast<std::uint64_t>(m)));
    parallel_for(kBatches, plan.shards, [&](std::size_t b) {
      Stream stream = root.substream(b);
      const std::uint64_t count = batch_size(plan.samples, static_cast<std::uint32_t>(b));
      const auto cap = static_cast<std::uint64_t>(max_tries_factor * mm * static_cast<double>(count));
      sample_bridges_q(2, static_cast<int>(m), count, stream, std::max<std::uint64_t>(cap, 1000), [&](std::int64_t q) {
        if (static_cast<double>(q) <= threshold) ++hits[b];
      });
    });
    SiltTailPoint pt;
    pt.m = m;
    pt.threshold = threshold;
    pt.bridges = plan.samples;
    std::uint64_t h = 0;
    for (auto x : hits) h += x;
    pt.probability = static_cast<double>(h) / static_cast<double>(plan.samples);
    pt.std_error = std::sqrt(pt.probability * (1.0 - pt.probability) / static_cast<double>(plan.samples));
    s.points.push_back(pt);
  }
  return s;
}

}  // namespace cpoly
