#pragma once

#include <cstdint>

namespace smoothsketch {

// Counter-based random stream: the n-th output is a SplitMix64 hash of
// (key, n), so streams derived from distinct keys are independent and the
// sequence does not depend on how other streams are consumed.
class Stream {
 public:
  Stream() = default;
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (one value per call).
  double normal();

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Stream roles used by the simulator.
enum class StreamRole : std::uint64_t {
  kNodeUplink = 1,
  kMaster = 2,
  kCoin = 3,
  kInit = 4,
  kShuffle = 5,
  kSynthetic = 6,
  kGeneric = 7,
};

// Derives an independent stream for (seed, role, index).
Stream derive_stream(std::uint64_t seed, StreamRole role, std::uint64_t index = 0);

}  // namespace smoothsketch
