#include "smoothsketch/rng.hpp"

#include <cmath>
#include <numbers>

namespace smoothsketch {

std::uint64_t Stream::below(std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r = next_u64();
  while (r >= limit) r = next_u64();
  return r % bound;
}

double Stream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Stream derive_stream(std::uint64_t seed, StreamRole role, std::uint64_t index) {
  std::uint64_t k = Stream::mix(seed ^ 0x6a09e667f3bcc909ULL);
  k = Stream::mix(k + static_cast<std::uint64_t>(role) * 0xbb67ae8584caa73bULL);
  k = Stream::mix(k + index * 0x3c6ef372fe94f82bULL);
  return Stream(k);
}

}  // namespace smoothsketch
