#include "smoothsketch/compression.hpp"

#include <bit>
#include <cstring>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {
namespace {

constexpr double kRangeTol = 1e-6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace

Vec SparseUpdate::to_dense() const {
  Vec out = Vec::Zero(dim);
  for (std::size_t k = 0; k < indices.size(); ++k) out(indices[k]) = values[k];
  return out;
}

std::vector<std::uint8_t> serialize(const SparseUpdate& u) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 12 * u.indices.size());
  put_u32(out, u.dim);
  put_u32(out, static_cast<std::uint32_t>(u.indices.size()));
  for (std::size_t k = 0; k < u.indices.size(); ++k) {
    put_u32(out, u.indices[k]);
    put_f64(out, u.values[k]);
  }
  return out;
}

SparseUpdate deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw Error("sparse update: truncated header");
  SparseUpdate u;
  u.dim = get_u32(bytes, 0);
  const std::uint32_t count = get_u32(bytes, 4);
  if (bytes.size() != 8 + 12 * static_cast<std::size_t>(count)) {
    throw Error("sparse update: payload size does not match entry count");
  }
  u.indices.resize(count);
  u.values.resize(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t at = 8 + 12 * static_cast<std::size_t>(k);
    u.indices[k] = get_u32(bytes, at);
    u.values[k] = get_f64(bytes, at + 4);
    if (u.indices[k] >= u.dim || (k > 0 && u.indices[k] <= u.indices[k - 1])) {
      throw Error("sparse update: indices must be increasing and below dim");
    }
  }
  return u;
}

Compressor Compressor::matrix_aware(std::shared_ptr<const SmoothnessMatrix> l, Sampling s) {
  if (!l) throw Error("matrix-aware compressor needs a smoothness matrix");
  if (l->dim() != s.dim()) throw DimMismatch("sampling and smoothness matrix dimensions differ");
  Compressor c;
  c.mode_ = CompressorMode::kMatrixAware;
  c.dim_ = l->dim();
  c.l_ = std::move(l);
  c.sampling_ = std::move(s);
  return c;
}

Compressor Compressor::standard(Sampling s) {
  Compressor c;
  c.mode_ = CompressorMode::kStandard;
  c.dim_ = s.dim();
  c.sampling_ = std::move(s);
  return c;
}

Compressor Compressor::identity(int d) {
  Compressor c;
  c.mode_ = CompressorMode::kIdentity;
  c.dim_ = d;
  c.sampling_ = Sampling::full(d);
  return c;
}

double Compressor::omega() const {
  return mode_ == CompressorMode::kIdentity ? 0.0 : sampling_.omega();
}

SparseUpdate Compressor::compress(const Vec& g, Stream& rng) const {
  if (mode_ == CompressorMode::kIdentity) {
    return compress_with(g, DiagonalSketch{});
  }
  return compress_with(g, draw_sketch(sampling_, rng));
}

SparseUpdate Compressor::compress_with(const Vec& g, const DiagonalSketch& c) const {
  if (g.size() != dim_) throw DimMismatch("compress: vector dimension mismatch");
  SparseUpdate u;
  u.dim = static_cast<std::uint32_t>(dim_);
  auto push = [&](int j, double v) {
    if (v != 0.0) {
      u.indices.push_back(static_cast<std::uint32_t>(j));
      u.values.push_back(v);
    }
  };
  switch (mode_) {
    case CompressorMode::kIdentity:
      for (int j = 0; j < dim_; ++j) push(j, g(j));
      break;
    case CompressorMode::kStandard:
      for (std::size_t k = 0; k < c.active.size(); ++k) {
        push(c.active[k], c.scale[k] * g(c.active[k]));
      }
      break;
    case CompressorMode::kMatrixAware: {
      const double off = l_->distance_to_range(g);
      if (off > kRangeTol * g.norm()) {
        throw OutOfRange("gradient has a component of norm " + std::to_string(off) +
                         " outside range(L)");
      }
      for (std::size_t k = 0; k < c.active.size(); ++k) {
        push(c.active[k], c.scale[k] * l_->pinv_sqrt_row_dot(c.active[k], g));
      }
      break;
    }
  }
  return u;
}

Vec Compressor::decompress(const SparseUpdate& u) const {
  Vec out = Vec::Zero(dim_);
  decompress_add(u, 1.0, out);
  return out;
}

void Compressor::decompress_add(const SparseUpdate& u, double scale, Vec& out) const {
  if (static_cast<int>(u.dim) != dim_ || out.size() != dim_) {
    throw DimMismatch("decompress: dimension mismatch");
  }
  if (mode_ == CompressorMode::kMatrixAware) {
    for (std::size_t k = 0; k < u.indices.size(); ++k) {
      l_->add_sqrt_column(static_cast<int>(u.indices[k]), scale * u.values[k], out);
    }
    return;
  }
  for (std::size_t k = 0; k < u.indices.size(); ++k) out(u.indices[k]) += scale * u.values[k];
}

Mat Compressor::second_moment_matrix() const {
  if (mode_ == CompressorMode::kIdentity) {
    throw UnsupportedMode("second moment is defined for sketch-based compressors only");
  }
  const ProbabilityMatrices pm = probability_matrices(sampling_);
  if (mode_ == CompressorMode::kStandard) return hadamard(pm.Pbar, Mat::Identity(dim_, dim_));
  return hadamard(pm.Pbar, l_->dense());
}

}  // namespace smoothsketch
