#pragma once

#include <functional>
#include <vector>

#include "smoothsketch/psd.hpp"
#include "smoothsketch/rng.hpp"

namespace smoothsketch {

// D*(y) = B^{-1} S^T (S B^{-1} S^T)^dagger y: the solution of S z = y with the
// smallest B-norm. Throws DimMismatch, NotPSD when B is not positive definite.
Vec optimal_decode(const Mat& s, const Mat& b, const Vec& y);
// The d x s matrix of the decoder above.
Mat optimal_decoder(const Mat& s, const Mat& b);
// Z = S^{dagger_B} S, the B-orthogonal projector onto range(B^{-1} S^T).
Mat z_matrix(const Mat& s, const Mat& b);
// Singular values above rel_tol * largest.
int numerical_rank(const Mat& a, double rel_tol = kDefaultRankTol);

enum class SketchSchemeKind { kFixedMatrix, kRotatedSparsifier, kCustomSampler };

// A distribution over linear encoders S with the pseudo-inverse decoder,
// measured in the B inner product.
class LinearSketchScheme {
 public:
  using Sampler = std::function<Mat(Stream&)>;

  static LinearSketchScheme fixed(Mat s, Mat b);
  // S = C Q^T with Q the eigenvectors of B and C keeping row j with
  // probability p_j. Throws NotPSD unless B is positive definite.
  static LinearSketchScheme rotated_sparsifier(Mat b, Vec p);
  static LinearSketchScheme rotated_uniform(Mat b, double q);
  static LinearSketchScheme custom(Mat b, Sampler sampler);

  SketchSchemeKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(b_.rows()); }
  const Mat& norm_matrix() const noexcept { return b_; }
  const Vec& probabilities() const noexcept { return p_; }
  const Mat& rotation() const noexcept { return q_; }

  // One encoder draw. Rotated sparsifiers keep dropped rows as zeros.
  Mat draw(Stream& rng) const;

 private:
  SketchSchemeKind kind_ = SketchSchemeKind::kFixedMatrix;
  Mat b_;
  Mat s_;
  Vec p_;
  Mat q_;
  Sampler sampler_;
};

// sup_{||x||_B = 1} E ||D(Sx) - x||_B^2. Fixed: exact from Z. Rotated: the
// closed form 1 - min p. Custom: 1 - lambda_min of B^{1/2} E[Z] B^{-1/2}
// with the expectation over `trials` draws.
double alpha_of_scheme(const LinearSketchScheme& sch, int trials, Stream& rng);

// Fixed: rank(S). Rotated: sum p. Custom: Monte Carlo mean of the rank.
double expected_rank(const LinearSketchScheme& sch, int trials, Stream& rng);

struct TradeoffAudit {
  double alpha = 0.0;
  double expected_rank_ratio = 0.0;  // E[r] / d
  double slack = 0.0;                // alpha + E[r]/d - 1
  bool satisfied = false;            // slack >= -tol
  bool tight = false;                // |slack| <= tol
};

TradeoffAudit tradeoff_audit(const LinearSketchScheme& sch, int trials, Stream& rng,
                             double tol = 1e-9);

// C Q^T with B = Q Lambda Q^T and C a 0/1 mask of inclusion probability q.
Mat build_optimal_sketch(const Mat& b, double q, Stream& rng);

// H_2(q) in bits.
double binary_entropy(double q);
// E[32 k + log2 C(d, k)] for k ~ Binomial(d, q): values plus entropy-coded
// index set.
double expected_sparsifier_bits(int d, double q);
// Same with 32-bit indices, as on the wire: 64 E[k].
double expected_wire_bits(int d, double q);

// Reference curves: the linear-sketch line alpha = 1 - beta and the general
// bound alpha = 4^{-b/d} with b = 32 d beta.
double linear_bound_alpha(double beta);
double general_bound_alpha(double beta);

}  // namespace smoothsketch
