#include "cpoly/lattice_walk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace cpoly {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                          std::to_string(dim));
  }
}

}  // namespace

WalkPath::WalkPath(int dim, std::vector<std::uint8_t> steps) : dim_(dim), steps_(std::move(steps)) {
  check_dim(dim);
  for (std::uint8_t c : steps_) {
    if (c >= 2 * dim) throw InvalidArgument("step code out of range for dimension");
  }
}

WalkPath WalkPath::parse(int dim, std::string_view codes) {
  check_dim(dim);
  std::vector<std::uint8_t> steps;
  steps.reserve(codes.size());
  for (char ch : codes) {
    const auto pos = kStepAlphabet.find(ch);
    if (pos == std::string_view::npos || static_cast<int>(pos) >= 2 * dim) {
      throw InvalidArgument(std::string("invalid step character '") + ch + "' for d=" +
                            std::to_string(dim));
    }
    steps.push_back(static_cast<std::uint8_t>(pos));
  }
  return WalkPath(dim, std::move(steps));
}

std::string WalkPath::to_string() const {
  std::string s;
  s.reserve(steps_.size());
  for (std::uint8_t c : steps_) s.push_back(kStepAlphabet[c]);
  return s;
}

std::vector<Site> WalkPath::positions() const {
  std::vector<Site> out;
  out.reserve(steps_.size() + 1);
  Site x{};
  out.push_back(x);
  for (std::uint8_t c : steps_) {
    x[static_cast<std::size_t>(step_axis(c))] += step_sign(c);
    out.push_back(x);
  }
  return out;
}

Site WalkPath::endpoint() const {
  Site x{};
  for (std::uint8_t c : steps_) x[static_cast<std::size_t>(step_axis(c))] += step_sign(c);
  return x;
}

WalkPath WalkPath::concat(const WalkPath& tail) const {
  if (tail.dim_ != dim_) throw InvalidArgument("concat: dimension mismatch");
  std::vector<std::uint8_t> s = steps_;
  s.insert(s.end(), tail.steps_.begin(), tail.steps_.end());
  return WalkPath(dim_, std::move(s));
}

std::int64_t LocalTimeField::at(const Site& x) const {
  const auto it = counts_.find(x);
  return it == counts_.end() ? 0 : it->second;
}

Site make_site(std::initializer_list<std::int32_t> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) throw InvalidArgument("too many coordinates");
  Site s{};
  std::copy(coords.begin(), coords.end(), s.begin());
  return s;
}

LocalTimeField local_times(const WalkPath& path) {
  if (path.length() == 0) throw InvalidArgument("local_times: zero-length path has no local times");
  std::map<Site, std::int64_t> counts;
  const auto pos = path.positions();
  for (std::size_t i = 1; i < pos.size(); ++i) ++counts[pos[i]];
  return LocalTimeField(path.dim(), path.length(), std::move(counts));
}

bool is_bridge(const WalkPath& path) {
  const auto steps = path.steps();
  if (steps.empty()) return false;
  std::int64_t x = 0;
  std::int64_t lowest = 0;
  std::int64_t highest = 0;
  bool interior_seen = false;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    if (step_axis(steps[i]) == 0) x += step_sign(steps[i]);
    if (!interior_seen) {
      lowest = highest = x;
      interior_seen = true;
    }
    lowest = std::min(lowest, x);
    highest = std::max(highest, x);
  }
  const std::uint8_t last = steps.back();
  const std::int64_t end = x + (step_axis(last) == 0 ? step_sign(last) : 0);
  if (end <= 0) return false;
  return !interior_seen || (lowest > 0 && highest < end);
}

WalkSummary summarize(const WalkPath& path, std::int64_t trim_threshold) {
  if (trim_threshold < 1) throw InvalidArgument("summarize: trim threshold must be >= 1");
  const LocalTimeField field = local_times(path);
  WalkSummary s;
  s.n = static_cast<std::int64_t>(path.length());
  s.trim_threshold = trim_threshold;
  s.range = static_cast<std::int64_t>(field.range());
  for (const auto& [site, count] : field.counts()) {
    s.q_n += count * count;
    s.max_local_time = std::max(s.max_local_time, count);
    if (count <= trim_threshold) {
      ++s.trimmed_range;
      s.trimmed_time += count;
    }
  }
  s.is_bridge = is_bridge(path);
  return s;
}

double walk_count(int dim, int n) {
  check_dim(dim);
  if (n < 0) throw InvalidArgument("walk_count: negative length");
  return std::pow(2.0 * dim, n);
}

void check_enumeration_budget(int dim, int n, double budget) {
  const double count = walk_count(dim, n);
  if (count > budget) {
    throw BudgetExceeded("enumeration of (2d)^n paths with d=" + std::to_string(dim) +
                             ", n=" + std::to_string(n),
                         count, budget);
  }
}

namespace {

struct CollectVisitor {
  int dim;
  std::vector<std::uint8_t> steps;
  const std::function<void(const WalkPath&)>* visit;
  void push(int code, std::int32_t) { steps.push_back(static_cast<std::uint8_t>(code)); }
  void pop(int, std::int32_t) { steps.pop_back(); }
  void leaf() { (*visit)(WalkPath(dim, steps)); }
};

}  // namespace

void enumerate_walks(int dim, int n, const std::function<void(const WalkPath&)>& visit, double budget) {
  check_enumeration_budget(dim, n, budget);
  if (n < 1) throw InvalidArgument("enumerate_walks: n must be >= 1");
  CollectVisitor v{dim, {}, &visit};
  v.steps.reserve(static_cast<std::size_t>(n));
  walk_tree(dim, n, {}, v);
}

WalkPath sample_walk(int dim, int n, Stream& stream) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("sample_walk: n must be >= 1");
  StepSource src(stream, 2 * dim);
  std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
  for (auto& c : steps) c = static_cast<std::uint8_t>(src.next());
  return WalkPath(dim, std::move(steps));
}

BridgeSample sample_bridge(int dim, int n, Stream& stream, std::uint64_t max_tries) {
  check_dim(dim);
  if (n < 1) throw InvalidArgument("sample_bridge: n must be >= 1");
  if (max_tries < 1) throw InvalidArgument("sample_bridge: max_tries must be >= 1");
  StepSource src(stream, 2 * dim);
  std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
  for (std::uint64_t attempt = 0; attempt < max_tries; ++attempt) {
    std::int64_t x = 0;
    std::int64_t highest = 0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const int c = src.next();
      steps[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(c);
      if (step_axis(c) == 0) x += step_sign(c);
      if (x <= 0) {
        ok = false;
        break;
      }
      if (i + 1 < n) highest = std::max(highest, x);
    }
    if (ok && x > highest) return BridgeSample{WalkPath(dim, steps), attempt};
  }
  throw AcceptanceTooLow(max_tries, 0);
}

OccupancyBox::OccupancyBox(int dim, int radius) : dim_(dim) {
  check_dim(dim);
  const std::size_t width = 2 * static_cast<std::size_t>(radius) + 1;
  std::size_t cells = 1;
  std::size_t stride = 1;
  offsets_.resize(static_cast<std::size_t>(2 * dim));
  origin_ = 0;
  for (int a = 0; a < dim; ++a) {
    offsets_[static_cast<std::size_t>(2 * a)] = static_cast<std::ptrdiff_t>(stride);
    offsets_[static_cast<std::size_t>(2 * a + 1)] = -static_cast<std::ptrdiff_t>(stride);
    origin_ += static_cast<std::size_t>(radius) * stride;
    stride *= width;
    cells *= width;
  }
  cells_.assign(cells, 0);
}

std::vector<std::uint8_t> walk_prefix(int dim, int length, std::uint64_t index) {
  std::vector<std::uint8_t> p(static_cast<std::size_t>(length));
  const auto base = static_cast<std::uint64_t>(2 * dim);
  for (int i = length - 1; i >= 0; --i) {
    p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % base);
    index /= base;
  }
  return p;
}

int shard_prefix_length(int dim, int n, std::uint64_t target) {
  int k = 0;
  double pieces = 1;
  while (k < n && pieces < static_cast<double>(target)) {
    pieces *= 2.0 * dim;
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------

SiteCounter::SiteCounter(int dim, std::size_t max_length) : dim_(dim) {
  check_dim(dim);
  bits_ = 64 / dim;
  if (bits_ > 32) bits_ = 32;
  if (max_length > SiteCounter::max_length(dim)) {
    throw InvalidArgument("SiteCounter: walk length " + std::to_string(max_length) +
                          " exceeds key capacity " + std::to_string(SiteCounter::max_length(dim)) +
                          " for d=" + std::to_string(dim));
  }
  origin_key_ = 0;
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t unit = std::uint64_t{1} << (a * bits_);
    origin_key_ += unit << (bits_ - 1);
    delta_[static_cast<std::size_t>(2 * a)] = unit;
    delta_[static_cast<std::size_t>(2 * a + 1)] = ~unit + 1;  // -unit mod 2^64
  }
  const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(64, 2 * (max_length + 1)));
  mask_ = capacity - 1;
  keys_.assign(capacity, 0);
  counts_.assign(capacity, 0);
  stamp_.assign(capacity, 0);
  used_.reserve(max_length + 1);
  key_ = origin_key_;
}

std::size_t SiteCounter::max_length(int dim) {
  const int bits = std::min(32, 64 / dim);
  return (std::size_t{1} << (bits - 1)) - 1;
}

void SiteCounter::reset() {
  ++generation_;
  if (generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    generation_ = 1;
  }
  used_.clear();
  key_ = origin_key_;
}

std::size_t SiteCounter::find_slot(std::uint64_t key) const {
  std::size_t slot = static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> 20) & mask_;
  while (stamp_[slot] == generation_ && keys_[slot] != key) slot = (slot + 1) & mask_;
  return slot;
}

std::int64_t SiteCounter::step(int code) {
  key_ += delta_[static_cast<std::size_t>(code)];
  const std::size_t slot = find_slot(key_);
  if (stamp_[slot] != generation_) {
    stamp_[slot] = generation_;
    keys_[slot] = key_;
    counts_[slot] = 1;
    used_.push_back(slot);
    return 0;
  }
  return counts_[slot]++;
}

std::int32_t SiteCounter::coordinate(int axis) const {
  const std::uint64_t field = (key_ >> (axis * bits_)) & ((bits_ == 64 ? ~0ULL : (std::uint64_t{1} << bits_) - 1));
  return static_cast<std::int32_t>(static_cast<std::int64_t>(field) - (std::int64_t{1} << (bits_ - 1)));
}

}  // namespace cpoly
