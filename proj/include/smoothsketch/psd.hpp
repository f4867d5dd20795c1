#pragma once

#include <Eigen/Dense>

namespace smoothsketch {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultRankTol = 1e-10;

// Symmetric positive semidefinite matrix with its spectral factorization,
// square root and pseudo-inverse square root computed once at construction.
//
// Matrices whose off-diagonal entries are exactly zero are stored in a
// diagonal form and all applies cost O(d).
class SmoothnessMatrix {
 public:
  SmoothnessMatrix() = default;

  // Throws NotSymmetric when |A - A^T| exceeds 1e-8 * max|A|, NotPSD when an
  // eigenvalue is below -1e-8 * lambda_max. The input is symmetrized first.
  static SmoothnessMatrix from_dense(const Mat& entries, double rank_tol = kDefaultRankTol);
  static SmoothnessMatrix from_diagonal(const Vec& diag, double rank_tol = kDefaultRankTol);

  int dim() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  int rank() const noexcept { return rank_; }
  double lambda_max() const noexcept { return lambda_max_; }
  bool is_diagonal() const noexcept { return diagonal_; }

  // Nonincreasing, negative round-off clamped to zero.
  const Vec& eigenvalues() const noexcept { return eigenvalues_; }
  // Columns ordered like eigenvalues().
  const Mat& eigenvectors() const noexcept { return eigenvectors_; }

  const Mat& dense() const noexcept { return dense_; }
  const Vec& diagonal() const noexcept { return diag_; }
  const Mat& sqrt() const noexcept { return sqrt_; }
  const Mat& pinv_sqrt() const noexcept { return pinv_sqrt_; }
  const Mat& pinv() const noexcept { return pinv_; }

  Vec apply(const Vec& v) const;
  Vec apply_sqrt(const Vec& v) const;
  Vec apply_pinv_sqrt(const Vec& v) const;
  Vec apply_pinv(const Vec& v) const;

  // Row j of L^{dagger 1/2} times v, i.e. (L^{dagger 1/2} v)_j.
  double pinv_sqrt_row_dot(int j, const Vec& v) const;
  // out += scale * (column j of L^{1/2}).
  void add_sqrt_column(int j, double scale, Vec& out) const;

  // ||v||^2 measured in L^dagger.
  double pinv_norm_sq(const Vec& v) const;

  // Orthogonal projection onto range(L); idempotent.
  Vec project_onto_range(const Vec& v) const;
  // ||v - P_range v||.
  double distance_to_range(const Vec& v) const;

 private:
  void finish(double rank_tol);

  bool diagonal_ = false;
  int rank_ = 0;
  double lambda_max_ = 0.0;
  Vec diag_;
  Vec eigenvalues_;
  Mat eigenvectors_;
  Mat dense_;
  Mat sqrt_;
  Mat pinv_sqrt_;
  Mat pinv_;
  Mat range_basis_;  // d x rank
  Vec diag_sqrt_;
  Vec diag_pinv_sqrt_;
};

// Elementwise product; throws DimMismatch.
Mat hadamard(const Mat& a, const Mat& b);

// Largest eigenvalue of a symmetric matrix; throws NotSymmetric.
double lambda_max_of(const Mat& a);
// Smallest eigenvalue of a symmetric matrix; throws NotSymmetric.
double lambda_min_of(const Mat& a);

// Symmetry check with tolerance 1e-8 * max|entry|.
bool is_symmetric(const Mat& a);

}  // namespace smoothsketch
