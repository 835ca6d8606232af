#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tailfit {

namespace detail {
// One Philox4x32-10 block.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;
}  // namespace detail

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
// stream id and a 64-bit block index, so independent streams are obtained by
// construction instead of by jumping a sequential state. Each block yields
// two 64-bit outputs.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Sibling stream sharing the key. Streams derived from distinct ids never
  // overlap.
  CounterRng split(std::uint64_t stream) const noexcept { return CounterRng(seed(), stream); }

  std::uint64_t seed() const noexcept {
    return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
  }
  std::uint64_t stream() const noexcept { return stream_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  // Standard exponential.
  double exponential() noexcept;
  // Standard normal (Box-Muller; the second variate is cached).
  double normal() noexcept;
  // Pareto with distribution function 1 - x^{-alpha}, x >= 1.
  double pareto(double alpha) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Stream id for replication `rep` at sweep point `point` of a study. Keeps
// replication streams fixed no matter how the work is scheduled.
constexpr std::uint64_t replication_stream(std::uint64_t point, std::uint64_t rep) noexcept {
  return (point << 32) ^ rep;
}

}  // namespace tailfit
