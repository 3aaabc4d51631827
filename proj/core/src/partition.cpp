#include "cpoly/partition.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <mutex>

#include "cpoly/error.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/numeric.hpp"
#include "cpoly/parallel.hpp"

namespace cpoly {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_walk_args(int dim, std::int64_t n) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be in [1, 5]");
  if (n < 1) throw InvalidArgument("n must be >= 1");
}

SingleSiteTable table_for(const ChargeLaw& law, TiltParams tilt, std::int64_t n, Quantity q, unsigned shards) {
  return SingleSiteTable::build(law, tilt, n,
                                q == Quantity::kZStar ? SingleSiteTable::Kind::kGStar
                                                      : SingleSiteTable::Kind::kGTilted,
                                std::nullopt, shards);
}

// Number of prefix shards for exact enumeration; fixed so that results do
// not depend on the thread count.
constexpr std::uint64_t kPrefixShards = 256;

struct LogWeightVisitor {
  const std::vector<double>* lg;
  std::vector<double> value;
  std::size_t depth = 0;
  LogSumExp acc;
  void push(int, std::int32_t prev) {
    const auto c = static_cast<std::size_t>(prev);
    value[depth + 1] = value[depth] + ((*lg)[c + 1] - (*lg)[c]);
    ++depth;
  }
  void pop(int, std::int32_t) { --depth; }
  void leaf() { acc.add(value[depth]); }
};

}  // namespace

std::string to_string(Quantity q) { return q == Quantity::kZ ? "Z" : "Z*"; }

std::string to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::kExactEnum:
      return "exact_enum";
    case PartitionMethod::kDoubleEnum:
      return "double_enum";
    case PartitionMethod::kMonteCarlo:
      return "mc";
    case PartitionMethod::kConfinement:
      return "confinement";
  }
  return "?";
}

Hamiltonian hamiltonian(const WalkPath& path, std::span<const double> charges) {
  if (charges.size() != path.length()) {
    throw InvalidArgument("hamiltonian: path has " + std::to_string(path.length()) + " steps but " +
                          std::to_string(charges.size()) + " charges");
  }
  const auto pos = path.positions();
  // Group times 1..n by site.
  std::vector<std::size_t> order(path.length());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pos[a + 1] != pos[b + 1] ? pos[a + 1] < pos[b + 1] : a < b;
  });
  Hamiltonian h;
  CompensatedSum square;
  CompensatedSum pair;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double omega = 0.0;
    while (j < order.size() && pos[order[j] + 1] == pos[order[i] + 1]) {
      omega += charges[order[j]];
      ++j;
    }
    square.add(omega * omega);
    for (std::size_t a = i; a < j; ++a) {
      for (std::size_t b = a + 1; b < j; ++b) pair.add(charges[order[a]] * charges[order[b]]);
    }
    i = j;
  }
  h.square = square.value();
  h.pair = pair.value();
#ifndef NDEBUG
  double sum_sq = 0.0;
  for (double w : charges) sum_sq += w * w;
  assert(std::abs(h.square - (2.0 * h.pair + sum_sq)) <= 1e-9 * std::max(1.0, std::abs(h.square)));
#endif
  return h;
}

PartitionEstimate z_exact(const ChargeLaw& law, TiltParams tilt, int dim, int n, Quantity quantity,
                          unsigned shards, double budget) {
  check_walk_args(dim, n);
  tilt.validate();
  check_enumeration_budget(dim, n, budget);
  const SingleSiteTable table = table_for(law, tilt, n, quantity, shards);
  const std::vector<double>& lg = table.log_values();

  const int k = shard_prefix_length(dim, n, kPrefixShards);
  const auto pieces = static_cast<std::size_t>(std::llround(std::pow(2.0 * dim, k)));
  std::vector<LogSumExp> parts(pieces);
  parallel_for(pieces, shards, [&](std::size_t p) {
    const auto prefix = walk_prefix(dim, k, p);
    LogWeightVisitor v{&lg, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0), 0, {}};
    walk_tree(dim, n, prefix, v);
    parts[p] = v.acc;
  });
  LogSumExp total;
  for (const auto& p : parts) total.merge(p);

  PartitionEstimate e;
  e.n = n;
  e.quantity = quantity;
  e.log_value = total.value() - n * std::log(2.0 * dim);
  e.method = PartitionMethod::kExactEnum;
  e.shards = shards;
  return e;
}

// ---------------------------------------------------------------------------

DoubleEnumeration DoubleEnumeration::build(const ChargeLaw& law, int dim, int n, double budget) {
  check_walk_args(dim, n);
  if (!law.is_lattice()) throw InvalidArgument("double enumeration needs a finite lattice law");
  const auto units = law.support_units();
  const std::size_t k = units.size();
  const double work = walk_count(dim, n) * std::pow(static_cast<double>(k), n);
  if (work > budget) throw BudgetExceeded("double enumeration over walks and charges", work, budget);

  DoubleEnumeration de;
  de.law_ = &law;
  de.dim_ = dim;
  de.n_ = n;
  std::int64_t umax = 0;
  for (auto u : units) umax = std::max(umax, std::abs(u));
  de.max_h_ = static_cast<std::int64_t>(n) * n * umax * umax;
  // Compositions encoded in base n + 1 over all but the last support point.
  std::vector<std::size_t> radix(k, 0);
  std::size_t comps = 1;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    radix[j] = comps;
    comps *= static_cast<std::size_t>(n) + 1;
  }
  de.compositions_ = comps;
  const double cells = static_cast<double>(comps) * static_cast<double>(de.max_h_ + 1);
  if (cells > 5e7) throw BudgetExceeded("double enumeration histogram", cells, 5e7);
  de.counts_.assign(static_cast<std::size_t>(cells), 0);
  de.composition_counts_.assign(comps, std::vector<int>(k, 0));
  for (std::size_t c = 0; c < comps; ++c) {
    std::size_t rest = c;
    int used = 0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      de.composition_counts_[c][j] = static_cast<int>(rest % (static_cast<std::size_t>(n) + 1));
      rest /= static_cast<std::size_t>(n) + 1;
      used += de.composition_counts_[c][j];
    }
    de.composition_counts_[c][k - 1] = n - used;  // may be negative: never hit
  }

  const int plen = shard_prefix_length(dim, n, kPrefixShards);
  const auto pieces = static_cast<std::size_t>(std::llround(std::pow(2.0 * dim, plen)));
  std::mutex merge;
  parallel_for(pieces, 0, [&](std::size_t p) {
    std::vector<std::uint64_t> local(de.counts_.size(), 0);
    struct Visitor {
      int dim;
      int n;
      std::span<const std::int64_t> units;
      const std::vector<std::size_t>* radix;
      std::size_t comps;
      std::vector<std::uint64_t>* out;
      std::vector<std::uint8_t> codes;
      std::vector<int> site_of;
      std::vector<std::int64_t> omega;
      void push(int c, std::int32_t) { codes.push_back(static_cast<std::uint8_t>(c)); }
      void pop(int, std::int32_t) { codes.pop_back(); }
      void leaf() {
        // Label sites by first visit.
        std::vector<Site> sites;
        Site x{};
        for (int i = 0; i < n; ++i) {
          const int c = codes[static_cast<std::size_t>(i)];
          x[static_cast<std::size_t>(step_axis(c))] += step_sign(c);
          const auto it = std::find(sites.begin(), sites.end(), x);
          if (it == sites.end()) {
            site_of[static_cast<std::size_t>(i)] = static_cast<int>(sites.size());
            sites.push_back(x);
          } else {
            site_of[static_cast<std::size_t>(i)] = static_cast<int>(it - sites.begin());
          }
        }
        std::fill(omega.begin(), omega.end(), 0);
        charges(0, 0, 0);
      }
      void charges(int i, std::int64_t h, std::size_t comp) {
        if (i == n) {
          ++(*out)[static_cast<std::size_t>(h) * comps + comp];
          return;
        }
        std::int64_t& om = omega[static_cast<std::size_t>(site_of[static_cast<std::size_t>(i)])];
        for (std::size_t j = 0; j < units.size(); ++j) {
          const std::int64_t u = units[j];
          const std::int64_t dh = 2 * om * u + u * u;
          om += u;
          charges(i + 1, h + dh, comp + (*radix)[j]);
          om -= u;
        }
      }
    };
    Visitor v{dim, n, units, &radix, comps, &local, {}, std::vector<int>(static_cast<std::size_t>(n)),
              std::vector<std::int64_t>(static_cast<std::size_t>(n))};
    v.codes.reserve(static_cast<std::size_t>(n));
    walk_tree(dim, n, walk_prefix(dim, plen, p), v);
    std::lock_guard lock(merge);
    for (std::size_t i = 0; i < local.size(); ++i) de.counts_[i] += local[i];
  });
  return de;
}

PartitionEstimate DoubleEnumeration::evaluate(TiltParams tilt, Quantity quantity) const {
  tilt.validate();
  const ChargeLaw& law = *law_;
  const auto units = law.support_units();
  const auto probs = law.probabilities();
  const double span = law.span_value();
  std::vector<double> comp_log(compositions_, kNegInf);
  std::vector<double> comp_sum(compositions_, 0.0);
  for (std::size_t c = 0; c < compositions_; ++c) {
    const auto& cnt = composition_counts_[c];
    if (cnt.back() < 0) continue;
    double lp = 0.0;
    std::int64_t s = 0;
    for (std::size_t j = 0; j < units.size(); ++j) {
      lp += cnt[j] * std::log(probs[j]);
      s += cnt[j] * units[j];
    }
    comp_log[c] = lp;
    comp_sum[c] = static_cast<double>(s) * span;
  }
  LogSumExp acc;
  for (std::int64_t h = 0; h <= max_h_; ++h) {
    const double energy = static_cast<double>(h) * span * span;
    for (std::size_t c = 0; c < compositions_; ++c) {
      const std::uint64_t count = counts_[static_cast<std::size_t>(h) * compositions_ + c];
      if (count == 0) continue;
      acc.add(std::log(static_cast<double>(count)) + comp_log[c] + tilt.delta * comp_sum[c] - tilt.beta * energy);
    }
  }
  PartitionEstimate e;
  e.n = n_;
  e.quantity = quantity;
  e.method = PartitionMethod::kDoubleEnum;
  e.log_value = acc.value() - n_ * std::log(2.0 * dim_);
  if (quantity == Quantity::kZ) e.log_value -= n_ * log_mgf(law, tilt.delta);
  return e;
}

PartitionEstimate z_double_enum(const ChargeLaw& law, TiltParams tilt, int dim, int n, Quantity quantity,
                                double budget) {
  return DoubleEnumeration::build(law, dim, n, budget).evaluate(tilt, quantity);
}

// ---------------------------------------------------------------------------

namespace {

struct BatchResult {
  LogSumExp first;
  LogSumExp second;
  std::uint64_t count = 0;
};

// Batch-means combination of per-batch log-sum-exp accumulators.
PartitionEstimate combine_batches(const std::vector<BatchResult>& batches) {
  LogSumExp first;
  LogSumExp second;
  std::uint64_t total = 0;
  for (const auto& b : batches) {
    first.merge(b.first);
    second.merge(b.second);
    total += b.count;
  }
  PartitionEstimate e;
  e.samples = total;
  e.log_value = first.value() - std::log(static_cast<double>(total));
  std::vector<double> ratios;
  ratios.reserve(batches.size());
  for (const auto& b : batches) {
    const double lm = b.first.value() - std::log(static_cast<double>(b.count));
    ratios.push_back(std::exp(lm - e.log_value));
  }
  e.std_error = mean_se(ratios).se;
  e.ess = std::exp(2.0 * first.value() - second.value());
  e.ess_warning = e.ess < 100.0;
  return e;
}

void check_mc(const McConfig& mc) {
  if (mc.batches < 32) throw InvalidArgument("Monte Carlo needs at least 32 batches");
  if (mc.samples < mc.batches) throw InvalidArgument("Monte Carlo needs samples >= batches");
}

std::uint64_t batch_size(const McConfig& mc, std::uint32_t b) {
  return mc.samples / mc.batches + (b < mc.samples % mc.batches ? 1 : 0);
}

}  // namespace

PartitionEstimate z_mc(const ChargeLaw& law, TiltParams tilt, int dim, int n, const McConfig& mc, Quantity quantity,
                       const SingleSiteTable* table) {
  check_walk_args(dim, n);
  tilt.validate();
  check_mc(mc);
  PartitionEstimate e;
  if (tilt.beta == 0.0) {
    // g*(l) = M^l and g(l) = 1: every walk has the same weight.
    e.log_value = quantity == Quantity::kZStar ? n * log_mgf(law, tilt.delta) : 0.0;
    e.samples = mc.samples;
    e.ess = static_cast<double>(mc.samples);
  } else {
    std::optional<SingleSiteTable> own;
    if (table == nullptr || table->max_ell() < n) {
      own = table_for(law, tilt, n, quantity, mc.shards);
      table = &*own;
    }
    const std::vector<double>& lg = table->log_values();
    std::vector<BatchResult> batches(mc.batches);
    const Stream root(mc.seed);
    parallel_for(mc.batches, mc.shards, [&](std::size_t b) {
      Stream stream = root.substream(b);
      StepSource src(stream, 2 * dim);
      SiteCounter counter(dim, static_cast<std::size_t>(n));
      BatchResult& out = batches[b];
      out.count = batch_size(mc, static_cast<std::uint32_t>(b));
      for (std::uint64_t s = 0; s < out.count; ++s) {
        counter.reset();
        double lw = 0.0;
        for (int i = 0; i < n; ++i) {
          const auto c = static_cast<std::size_t>(counter.step(src.next()));
          lw += lg[c + 1] - lg[c];
        }
        out.first.add(lw);
        out.second.add(2.0 * lw);
      }
    });
    e = combine_batches(batches);
  }
  e.n = n;
  e.quantity = quantity;
  e.method = PartitionMethod::kMonteCarlo;
  e.seed = mc.seed;
  e.shards = mc.shards;
  return e;
}

double confinement_radius(int dim, std::int64_t n) {
  if (n < 2) return 1.0;
  const double nn = static_cast<double>(n);
  return std::max(1.0, std::pow(nn / std::log(nn), 1.0 / (dim + 2)));
}

PartitionEstimate z_confined(const ChargeLaw& law, TiltParams tilt, int dim, int n, const McConfig& mc,
                             const SingleSiteTable* table) {
  check_walk_args(dim, n);
  tilt.validate();
  check_mc(mc);
  std::optional<SingleSiteTable> own;
  if (table == nullptr || table->max_ell() < n) {
    own = table_for(law, tilt, n, Quantity::kZStar, mc.shards);
    table = &*own;
  }
  const std::vector<double>& lg = table->log_values();
  const double r = confinement_radius(dim, n);
  const double r2 = r * r;
  const double log2d = std::log(2.0 * dim);
  std::vector<BatchResult> batches(mc.batches);
  const Stream root(mc.seed);
  parallel_for(mc.batches, mc.shards, [&](std::size_t b) {
    Stream stream = root.substream(b);
    SiteCounter counter(dim, static_cast<std::size_t>(n));
    BatchResult& out = batches[b];
    out.count = batch_size(mc, static_cast<std::uint32_t>(b));
    std::array<int, 2 * kMaxDim> allowed{};
    for (std::uint64_t s = 0; s < out.count; ++s) {
      counter.reset();
      std::array<std::int64_t, kMaxDim> x{};
      std::int64_t norm2 = 0;
      double lw = 0.0;
      for (int i = 0; i < n; ++i) {
        int k = 0;
        for (int c = 0; c < 2 * dim; ++c) {
          const std::int64_t xa = x[static_cast<std::size_t>(step_axis(c))];
          if (static_cast<double>(norm2 + 2 * step_sign(c) * xa + 1) <= r2) allowed[static_cast<std::size_t>(k++)] = c;
        }
        const int c = allowed[stream.below(static_cast<std::uint32_t>(k))];
        norm2 += 2 * step_sign(c) * x[static_cast<std::size_t>(step_axis(c))] + 1;
        x[static_cast<std::size_t>(step_axis(c))] += step_sign(c);
        const auto prev = static_cast<std::size_t>(counter.step(c));
        lw += std::log(static_cast<double>(k)) - log2d + lg[prev + 1] - lg[prev];
      }
      out.first.add(lw);
      out.second.add(2.0 * lw);
    }
  });
  PartitionEstimate e = combine_batches(batches);
  e.n = n;
  e.quantity = Quantity::kZStar;
  e.method = PartitionMethod::kConfinement;
  e.seed = mc.seed;
  e.shards = mc.shards;
  return e;
}

// ---------------------------------------------------------------------------

LadderResult free_energy_ladder(const ChargeLaw& law, TiltParams tilt, int dim,
                                const std::vector<std::int64_t>& ladder, const LadderOptions& options) {
  tilt.validate();
  if (ladder.empty()) throw InvalidArgument("ladder: no rungs");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    check_walk_args(dim, ladder[i]);
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw InvalidArgument("ladder: rungs must strictly increase");
  }
  const std::int64_t top = ladder.back();
  const SingleSiteTable table = table_for(law, tilt, top, Quantity::kZStar, options.mc.shards);

  LadderResult r;
  r.law_id = law.id();
  r.tilt = tilt;
  r.dim = dim;
  r.f_delta = annealed_exponent(law, tilt.delta);
  for (std::int64_t n : ladder) {
    LadderRung rung;
    rung.n = n;
    if (walk_count(dim, static_cast<int>(std::min<std::int64_t>(n, 1000))) <= options.exact_budget) {
      rung.estimate = z_exact(law, tilt, dim, static_cast<int>(n), Quantity::kZStar, options.mc.shards);
    } else {
      McConfig mc = options.mc;
      mc.seed = substream_seed(options.mc.seed, static_cast<std::uint64_t>(n));
      rung.estimate = z_mc(law, tilt, dim, static_cast<int>(n), mc, Quantity::kZStar, &table);
      rung.excluded = rung.estimate.ess_warning;
    }
    rung.a_n = rung.estimate.log_value / static_cast<double>(n);
    rung.a_n_error = rung.estimate.std_error / static_cast<double>(n);
    if (options.with_confinement && n >= 2) {
      McConfig mc = options.mc;
      mc.seed = substream_seed(options.mc.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(n));
      const PartitionEstimate c = z_confined(law, tilt, dim, static_cast<int>(n), mc, &table);
      rung.confinement_a_n = c.log_value / static_cast<double>(n);
      rung.confinement_error = c.std_error / static_cast<double>(n);
    }
    r.rungs.push_back(rung);
  }

  std::vector<const LadderRung*> usable;
  for (const auto& rung : r.rungs) {
    if (!rung.excluded) usable.push_back(&rung);
  }
  if (usable.empty()) throw EssCollapse("free-energy ladder: every rung has ESS below 100");
  if (usable.size() == 1) {
    r.f_star = usable.back()->a_n;
    r.f_star_error = usable.back()->a_n_error;
  } else {
    const LadderRung& hi = *usable[usable.size() - 1];
    const LadderRung& lo = *usable[usable.size() - 2];
    const double dn = static_cast<double>(hi.n - lo.n);
    r.f_star = (hi.estimate.log_value - lo.estimate.log_value) / dn;
    r.f_star_error = std::hypot(hi.estimate.std_error, lo.estimate.std_error) / dn;
  }
  r.f = r.f_star + r.f_delta;
  r.f_error = r.f_star_error;
  const double slack = 3.0 * r.f_error + 1e-12;
  r.sandwich_ok = r.f >= r.f_delta - slack && r.f <= slack;

  bool super = true;
  const auto& lg = table.log_values();
  for (std::int64_t m = 1; 2 * m <= top && super; ++m) {
    for (std::int64_t k = m; m + k <= top; ++k) {
      if (lg[static_cast<std::size_t>(m + k)] - lg[static_cast<std::size_t>(m)] - lg[static_cast<std::size_t>(k)] <
          0) {
        super = false;
        break;
      }
    }
  }
  if (super) {
    r.monotonicity = "superadditive";
  } else {
    bool inc = true;
    bool dec = true;
    for (std::size_t i = 1; i < r.rungs.size(); ++i) {
      const double d = r.rungs[i].a_n - r.rungs[i - 1].a_n;
      const double s = 3.0 * std::hypot(r.rungs[i].a_n_error, r.rungs[i - 1].a_n_error);
      if (d < -s) inc = false;
      if (d > s) dec = false;
    }
    r.monotonicity = inc && !dec ? "increasing" : (dec && !inc ? "decreasing" : "none");
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

ScanProbe probe(const ChargeLaw& law, double delta, double beta, int dim, std::int64_t n, const McConfig& base,
                std::uint64_t probe_index) {
  const TiltParams tilt{delta, beta};
  const SingleSiteTable table = table_for(law, tilt, n, Quantity::kZStar, base.shards);
  McConfig mc = base;
  mc.seed = substream_seed(base.seed, 2 * probe_index);
  const PartitionEstimate hi = z_mc(law, tilt, dim, static_cast<int>(n), mc, Quantity::kZStar, &table);
  mc.seed = substream_seed(base.seed, 2 * probe_index + 1);
  const PartitionEstimate lo = z_mc(law, tilt, dim, static_cast<int>(n / 2), mc, Quantity::kZStar, &table);
  ScanProbe p;
  p.beta = beta;
  const double dn = static_cast<double>(n - n / 2);
  p.statistic = (hi.log_value - lo.log_value) / dn;
  p.std_error = std::hypot(hi.std_error, lo.std_error) / dn;
  if (p.statistic > 3.0 * p.std_error) {
    p.decision = "positive";
  } else if (p.statistic < -3.0 * p.std_error) {
    p.decision = "negative";
  } else {
    p.decision = "zero";
  }
  return p;
}

}  // namespace

CriticalScan critical_scan(const ChargeLaw& law, const std::vector<double>& deltas, int dim, std::int64_t n,
                           const ScanOptions& options) {
  check_walk_args(dim, n);
  if (n < 4) throw InvalidArgument("critical scan: n must be >= 4");
  if (!(options.tol > 0)) throw InvalidArgument("critical scan: tol must be > 0");
  CriticalScan scan;
  scan.law_id = law.id();
  scan.dim = dim;
  scan.n = n;
  std::uint64_t counter = 0;
  for (double delta : deltas) {
    if (!(delta > 0)) throw InvalidArgument("critical scan: delta grid must be positive");
    ScanEntry entry;
    entry.delta = delta;
    entry.beta_lo = 0.0;
    entry.beta_hi = options.beta_max_factor * delta * delta;
    // Make sure the upper end is not in the extended phase.
    for (int grow = 0; grow < 8; ++grow) {
      ScanProbe p = probe(law, delta, entry.beta_hi, dim, n, options.mc, counter++);
      entry.probes.push_back(p);
      if (p.decision != "positive") break;
      entry.beta_lo = entry.beta_hi;
      entry.beta_hi *= 2.0;
    }
    int used = 0;
    while (entry.beta_hi - entry.beta_lo > options.tol && used < options.max_probes) {
      const double mid = 0.5 * (entry.beta_lo + entry.beta_hi);
      ScanProbe p = probe(law, delta, mid, dim, n, options.mc, counter++);
      entry.probes.push_back(p);
      if (p.decision == "positive") {
        entry.beta_lo = mid;
      } else {
        entry.beta_hi = mid;
      }
      ++used;
    }
    entry.resolved = entry.beta_hi - entry.beta_lo <= options.tol;
    entry.beta_hat = 0.5 * (entry.beta_lo + entry.beta_hi);
    scan.entries.push_back(entry);
  }
  scan.monotone = true;
  for (std::size_t i = 1; i < scan.entries.size(); ++i) {
    const auto& a = scan.entries[i - 1];
    const auto& b = scan.entries[i];
    if (b.delta > a.delta && b.beta_hi < a.beta_lo) scan.monotone = false;
  }
  return scan;
}

BetaCPrediction beta_c_asymptote(const ChargeLaw& law, double delta, AsymptoticRegime regime, int dim) {
  if (!(delta > 0)) throw InvalidArgument("beta_c asymptote: delta must be > 0");
  BetaCPrediction p;
  if (regime == AsymptoticRegime::kSmall) {
    if (delta >= 1) throw InvalidArgument("beta_c asymptote: the small regime needs delta < 1");
    if (dim < 2) throw InvalidArgument("beta_c asymptote: the small regime needs d >= 2");
    const double m3 = law.moment(3);
    const double m4 = law.moment(4);
    const double kappa_lower = m4 / 12.0 - m3 * m3 / 3.0;
    const double lambda = lambda_constant(dim);
    const double d4 = std::pow(delta, 4);
    const double base = 0.5 * delta * delta - m3 * delta * delta * delta / 3.0;
    double eps_up;
    if (dim == 2) {
      p.kappa = 0.25 * lambda;
      eps_up = p.kappa * d4 * std::log(1.0 / delta);
    } else {
      p.kappa = 0.25 * (lambda - 1.0) + kappa_lower;
      eps_up = p.kappa * d4;
    }
    p.regime = "small";
    p.kappa_lower = kappa_lower;
    p.lower = base - eps_up;
    p.upper = base - kappa_lower * d4;
    return p;
  }
  p.regime = "large";
  const double t = lattice_span(law);
  if (t > 0) {
    p.lower = p.upper = delta / t;
  } else if (law.has_density()) {
    if (!(delta > 1)) throw InvalidArgument("beta_c asymptote: the non-lattice large regime needs delta > 1");
    p.lower = p.upper = delta * delta / (4.0 * std::log(delta));
  } else {
    throw InvalidArgument("beta_c asymptote: law has neither a lattice span nor a density");
  }
  return p;
}

}  // namespace cpoly
