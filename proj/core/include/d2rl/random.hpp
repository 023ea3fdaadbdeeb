#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace d2rl {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed is the key. The 128-bit counter is split in two halves:
/// words 0-1 count blocks within a stream, words 2-3 hold the stream id.
/// Distinct (seed, stream) pairs therefore yield non-overlapping sequences
/// without any state shared between them, which is what lets seeds and
/// sweep cells run on separate threads.
///
/// Satisfies std::uniform_random_bit_generator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Skip ahead by `blocks` 128-bit blocks.
  void discard_blocks(std::uint64_t blocks) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// The raw bijection: ten rounds of Philox applied to `counter` under `key`.
  static Block generate(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  std::size_t used_ = 4;
};

/// Stream ids reserved by the harness so that environment noise and agent
/// exploration never share draws.
namespace streams {
inline constexpr std::uint64_t kAgent = 0;
inline constexpr std::uint64_t kEnvironment = 1;
inline constexpr std::uint64_t kGenerator = 2;
}  // namespace streams

/// Distribution helpers over Philox4x32. All conversions are written out
/// here rather than taken from <random> so that output is identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept : engine_(seed, stream) {}

  std::uint32_t next_u32() noexcept { return engine_(); }
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Index drawn with probability proportional to `weights` (assumed to sum to ~1;
  /// the last nonzero entry absorbs rounding).
  std::size_t discrete(std::span<const double> weights);

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
};

}  // namespace d2rl
