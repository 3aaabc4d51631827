#include "cpoly/rng.hpp"

#include <bit>

#include "cpoly/error.hpp"

namespace cpoly {

std::uint32_t Stream::below(std::uint32_t bound) {
  if (bound == 0) throw InvalidArgument("Stream::below: bound must be positive");
  // Lemire's nearly divisionless method on 32-bit draws.
  std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(engine_() >> 32)) * bound;
  auto low = static_cast<std::uint32_t>(m);
  if (low < bound) {
    const std::uint32_t threshold = (0u - bound) % bound;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(engine_() >> 32)) * bound;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

StepSource::StepSource(Stream& stream, int codes) : stream_(&stream), codes_(codes) {
  if (codes < 2) throw InvalidArgument("StepSource: need at least two step codes");
  const auto u = static_cast<unsigned>(codes);
  if (std::has_single_bit(u)) {
    bits_ = std::countr_zero(u);
    mask_ = (std::uint64_t{1} << bits_) - 1;
  }
}

}  // namespace cpoly
