#include "smoothsketch/psd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {
namespace {

constexpr double kSymTol = 1e-8;
constexpr double kPsdTol = 1e-8;

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void require_square(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw DimMismatch("matrix must be square, got " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()));
  }
}

void require_symmetric(const Mat& a) {
  require_square(a);
  if (!is_symmetric(a)) throw NotSymmetric("matrix is not symmetric");
}

}  // namespace

bool is_symmetric(const Mat& a) {
  if (a.rows() != a.cols()) return false;
  const double tol = kSymTol * max_abs(a);
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

SmoothnessMatrix SmoothnessMatrix::from_dense(const Mat& entries, double rank_tol) {
  require_symmetric(entries);
  const Mat sym = 0.5 * (entries + entries.transpose());
  const Eigen::Index d = sym.rows();

  bool off_diagonal_zero = true;
  for (Eigen::Index j = 0; j < d && off_diagonal_zero; ++j) {
    for (Eigen::Index l = 0; l < d; ++l) {
      if (j != l && sym(j, l) != 0.0) {
        off_diagonal_zero = false;
        break;
      }
    }
  }
  if (off_diagonal_zero) return from_diagonal(sym.diagonal(), rank_tol);

  SmoothnessMatrix m;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw NotPSD("eigendecomposition failed");
  // Eigen returns ascending order.
  m.eigenvalues_ = es.eigenvalues().reverse();
  m.eigenvectors_ = es.eigenvectors().rowwise().reverse();
  m.dense_ = sym;
  m.finish(rank_tol);
  return m;
}

SmoothnessMatrix SmoothnessMatrix::from_diagonal(const Vec& diag, double rank_tol) {
  SmoothnessMatrix m;
  const Eigen::Index d = diag.size();
  m.diagonal_ = true;
  m.diag_ = diag;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return diag(a) > diag(b); });
  m.eigenvalues_.resize(d);
  m.eigenvectors_ = Mat::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m.eigenvalues_(k) = diag(order[static_cast<std::size_t>(k)]);
    m.eigenvectors_(order[static_cast<std::size_t>(k)], k) = 1.0;
  }
  m.dense_ = diag.asDiagonal();
  m.finish(rank_tol);
  return m;
}

void SmoothnessMatrix::finish(double rank_tol) {
  const Eigen::Index d = eigenvalues_.size();
  lambda_max_ = d == 0 ? 0.0 : std::max(0.0, eigenvalues_(0));
  // A matrix with no positive eigenvalue falls back to the entry scale.
  const double scale = lambda_max_ > 0.0 ? lambda_max_ : max_abs(dense_);
  const double psd_floor = -kPsdTol * scale;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (eigenvalues_(k) < psd_floor) {
      throw NotPSD("eigenvalue " + std::to_string(eigenvalues_(k)) + " below tolerance");
    }
    if (eigenvalues_(k) < 0.0) eigenvalues_(k) = 0.0;
  }
  if (diagonal_) {
    for (Eigen::Index k = 0; k < d; ++k) diag_(k) = std::max(diag_(k), 0.0);
  }

  const double cutoff = rank_tol * lambda_max_;
  rank_ = 0;
  Vec s(d), s_pinv(d), inv(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double ev = eigenvalues_(k);
    s(k) = std::sqrt(ev);
    if (ev > cutoff && ev > 0.0) {
      ++rank_;
      s_pinv(k) = 1.0 / s(k);
      inv(k) = 1.0 / ev;
    } else {
      // Dropped eigenvalues vanish from the square root too, so that
      // range(L^{1/2}) is exactly the numerical range.
      s(k) = 0.0;
      s_pinv(k) = 0.0;
      inv(k) = 0.0;
    }
  }

  if (diagonal_) {
    diag_sqrt_ = diag_.cwiseSqrt();
    diag_pinv_sqrt_.resize(d);
    Vec diag_pinv(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool keep = diag_(j) > cutoff && diag_(j) > 0.0;
      if (!keep) diag_sqrt_(j) = 0.0;
      diag_pinv_sqrt_(j) = keep ? 1.0 / diag_sqrt_(j) : 0.0;
      diag_pinv(j) = keep ? 1.0 / diag_(j) : 0.0;
    }
    sqrt_ = diag_sqrt_.asDiagonal();
    pinv_sqrt_ = diag_pinv_sqrt_.asDiagonal();
    pinv_ = diag_pinv.asDiagonal();
  } else {
    const Mat& q = eigenvectors_;
    sqrt_ = q * s.asDiagonal() * q.transpose();
    pinv_sqrt_ = q * s_pinv.asDiagonal() * q.transpose();
    pinv_ = q * inv.asDiagonal() * q.transpose();
  }
  range_basis_ = eigenvectors_.leftCols(rank_);
}

Vec SmoothnessMatrix::apply(const Vec& v) const {
  if (v.size() != dim()) throw DimMismatch("apply: vector dimension mismatch");
  if (diagonal_) return diag_.cwiseProduct(v);
  return dense_ * v;
}

Vec SmoothnessMatrix::apply_sqrt(const Vec& v) const {
  if (v.size() != dim()) throw DimMismatch("apply_sqrt: vector dimension mismatch");
  if (diagonal_) return diag_sqrt_.cwiseProduct(v);
  return sqrt_ * v;
}

Vec SmoothnessMatrix::apply_pinv_sqrt(const Vec& v) const {
  if (v.size() != dim()) throw DimMismatch("apply_pinv_sqrt: vector dimension mismatch");
  if (diagonal_) return diag_pinv_sqrt_.cwiseProduct(v);
  return pinv_sqrt_ * v;
}

Vec SmoothnessMatrix::apply_pinv(const Vec& v) const {
  if (v.size() != dim()) throw DimMismatch("apply_pinv: vector dimension mismatch");
  if (diagonal_) return diag_pinv_sqrt_.cwiseProduct(diag_pinv_sqrt_.cwiseProduct(v));
  return pinv_ * v;
}

double SmoothnessMatrix::pinv_sqrt_row_dot(int j, const Vec& v) const {
  if (diagonal_) return diag_pinv_sqrt_(j) * v(j);
  // pinv_sqrt_ is symmetric; column access is contiguous in column-major storage.
  return pinv_sqrt_.col(j).dot(v);
}

void SmoothnessMatrix::add_sqrt_column(int j, double scale, Vec& out) const {
  if (diagonal_) {
    out(j) += scale * diag_sqrt_(j);
    return;
  }
  out.noalias() += scale * sqrt_.col(j);
}

double SmoothnessMatrix::pinv_norm_sq(const Vec& v) const { return v.dot(apply_pinv(v)); }

Vec SmoothnessMatrix::project_onto_range(const Vec& v) const {
  if (v.size() != dim()) throw DimMismatch("project_onto_range: vector dimension mismatch");
  if (rank_ == dim()) return v;
  if (diagonal_) {
    Vec out = v;
    for (int j = 0; j < dim(); ++j) {
      if (diag_pinv_sqrt_(j) == 0.0) out(j) = 0.0;
    }
    return out;
  }
  return range_basis_ * (range_basis_.transpose() * v);
}

double SmoothnessMatrix::distance_to_range(const Vec& v) const {
  if (rank_ == dim()) return 0.0;
  return (v - project_onto_range(v)).norm();
}

Mat hadamard(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimMismatch("hadamard: operand dimensions differ");
  }
  return a.cwiseProduct(b);
}

double lambda_max_of(const Mat& a) {
  require_symmetric(a);
  if (a.size() == 0) return 0.0;
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min_of(const Mat& a) {
  require_symmetric(a);
  if (a.size() == 0) return 0.0;
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace smoothsketch
