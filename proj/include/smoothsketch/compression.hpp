#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "smoothsketch/psd.hpp"
#include "smoothsketch/rng.hpp"
#include "smoothsketch/sampling.hpp"

namespace smoothsketch {

inline constexpr std::uint64_t kBitsPerValue = 32;
inline constexpr std::uint64_t kBitsPerIndex = 32;

// Sparse message: strictly increasing indices, no stored zeros.
struct SparseUpdate {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::uint64_t payload_coords() const noexcept { return indices.size(); }
  std::uint64_t value_bits() const noexcept { return kBitsPerValue * indices.size(); }
  std::uint64_t index_bits() const noexcept { return kBitsPerIndex * indices.size(); }
  std::uint64_t payload_bits() const noexcept { return value_bits() + index_bits(); }

  Vec to_dense() const;
  bool operator==(const SparseUpdate&) const = default;
};

// Little-endian: u32 dim, u32 count, then count x (u32 index, f64 value).
std::vector<std::uint8_t> serialize(const SparseUpdate& u);
// Throws Error on truncated or malformed input.
SparseUpdate deserialize(std::span<const std::uint8_t> bytes);

enum class CompressorMode {
  kMatrixAware,  // send C L^{dagger 1/2} g, decode with L^{1/2}
  kStandard,     // send C g
  kIdentity,     // send g
};

class Compressor {
 public:
  static Compressor matrix_aware(std::shared_ptr<const SmoothnessMatrix> l, Sampling s);
  static Compressor standard(Sampling s);
  static Compressor identity(int d);

  CompressorMode mode() const noexcept { return mode_; }
  int dim() const noexcept { return dim_; }
  double omega() const;
  const Sampling& sampling() const noexcept { return sampling_; }
  const SmoothnessMatrix* matrix() const noexcept { return l_.get(); }

  // Draws a sketch from rng. Matrix-aware mode throws OutOfRange when g has a
  // component outside range(L) larger than 1e-6 ||g||.
  SparseUpdate compress(const Vec& g, Stream& rng) const;
  // Same, with a sketch drawn by the caller (one sketch can encode several
  // vectors in the same round).
  SparseUpdate compress_with(const Vec& g, const DiagonalSketch& c) const;
  // Throws DimMismatch when u.dim differs.
  Vec decompress(const SparseUpdate& u) const;
  // Accumulates scale * decompress(u) into out.
  void decompress_add(const SparseUpdate& u, double scale, Vec& out) const;

  // E[C^T L C] = Pbar o L (L = I for standard mode); throws UnsupportedMode
  // for identity.
  Mat second_moment_matrix() const;

 private:
  CompressorMode mode_ = CompressorMode::kIdentity;
  int dim_ = 0;
  std::shared_ptr<const SmoothnessMatrix> l_;
  Sampling sampling_;
};

}  // namespace smoothsketch
