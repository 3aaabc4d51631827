#pragma once

#include <cstdint>
#include <random>

namespace cpoly {

/// SplitMix64 finalizer, used only to derive well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `index` of the run seeded by `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// An owned random stream. There is no global generator: every sampler
/// takes one of these, and parallel work derives one per batch with
/// `substream(i)` so results do not depend on how batches map to threads.
class Stream {
 public:
  using engine_type = std::mt19937_64;

  explicit Stream(std::uint64_t seed, std::uint64_t index = 0)
      : seed_(seed), index_(index), engine_(substream_seed(seed, index)) {}

  Stream substream(std::uint64_t i) const {
    return Stream(substream_seed(seed_, index_), i);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased (multiply-shift with rejection).
  std::uint32_t below(std::uint32_t bound);

  double normal() { return normal_(engine_); }

  engine_type& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Buffered source of uniform step codes in [0, 2d). For 2d a power of two
/// it peels bits off 64-bit words; otherwise it falls back to Stream::below.
class StepSource {
 public:
  StepSource(Stream& stream, int codes);
  int next() {
    if (bits_ != 0) {
      if (left_ == 0) {
        word_ = stream_->next_u64();
        left_ = 64 / bits_;
      }
      const int c = static_cast<int>(word_ & mask_);
      word_ >>= bits_;
      --left_;
      return c;
    }
    return static_cast<int>(stream_->below(static_cast<std::uint32_t>(codes_)));
  }

 private:
  Stream* stream_;
  int codes_;
  int bits_ = 0;
  std::uint64_t mask_ = 0;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

}  // namespace cpoly
