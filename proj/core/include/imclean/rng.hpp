#pragma once

#include <array>
#include <cstdint>

namespace imclean::rng {

/// Philox4x64-10 counter-based block cipher. Stateless: output depends only
/// on (counter, key), so any draw can be addressed at random and generation
/// order (or thread scheduling) cannot change results.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

/// A deterministic random stream addressed by (seed, stream, index).
///
/// `stream` separates independent consumers (one per sky component, per
/// contamination kind, ...). Draws at distinct indices are independent;
/// the same (seed, stream, index) always yields the same value.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  /// Raw 256-bit block at a given block index.
  std::array<std::uint64_t, 4> block(std::uint64_t block_index) const {
    return philox4x64({block_index, 0, 0, 0}, key_);
  }

  std::uint64_t uint64_at(std::uint64_t index) const {
    return block(index / 4)[index % 4];
  }

  /// Uniform double strictly inside (0, 1).
  double uniform_at(std::uint64_t index) const;

  /// Standard normal via Box-Muller on uniform pairs.
  double gaussian_at(std::uint64_t index) const;

  // Two-level addressing: an independent sub-stream per `slot` (e.g. one per
  // Fourier mode or matrix cell), each with its own draw index.
  std::uint64_t uint64_at(std::uint64_t slot, std::uint64_t index) const {
    return philox4x64({index / 4, slot, 0, 0}, key_)[index % 4];
  }
  double uniform_at(std::uint64_t slot, std::uint64_t index) const;
  double gaussian_at(std::uint64_t slot, std::uint64_t index) const;

 private:
  std::array<std::uint64_t, 2> key_;
};

/// Sequential convenience wrapper over CounterRng.
class Sequence {
 public:
  Sequence(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}
  explicit Sequence(const CounterRng& rng) : rng_(rng) {}

  std::uint64_t next_uint64() { return rng_.uint64_at(next_++); }
  double next_uniform() { return rng_.uniform_at(next_++); }
  double next_gaussian() { return rng_.gaussian_at(next_++); }
  /// Uniform integer in [0, bound) by rejection-free 128-bit scaling.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

/// Stream identifiers. Component indices are added to the base values, so
/// bases are spaced far apart.
namespace streams {
inline constexpr std::uint64_t kFieldNoise = 0x100;       // + component index
inline constexpr std::uint64_t kRfiBroadband = 0x2000;
inline constexpr std::uint64_t kRfiNarrowband = 0x2001;
inline constexpr std::uint64_t kRfiOutliers = 0x2002;
inline constexpr std::uint64_t kRfiNarrowbandCell = 0x2003;
inline constexpr std::uint64_t kPatchOrigins = 0x3000;
inline constexpr std::uint64_t kIcaInit = 0x4000;
}  // namespace streams

}  // namespace imclean::rng
