#pragma once

#include <array>
#include <cstdint>

namespace addsel {

/// SplitMix64 finalizer; used to derive stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Key for replication `rep` of an experiment seeded with `base_seed`.
constexpr std::uint64_t stream_key(std::uint64_t base_seed, std::uint64_t rep) noexcept {
  return splitmix64(base_seed ^ splitmix64(rep));
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key
/// selects the stream; the counter walks through it. Output depends only on
/// (key, draw index), never on thread scheduling.
class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if (used_ == 2) refill();
    const std::size_t at = 2 * used_++;
    return (static_cast<std::uint64_t>(block_[at + 1]) << 32) | block_[at];
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept;

  /// One Philox4x32-10 block.
  static std::array<std::uint32_t, 4> bijection(std::array<std::uint32_t, 4> counter,
                                                std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  std::size_t used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace addsel
