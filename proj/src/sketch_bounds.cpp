#include "smoothsketch/sketch_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {
namespace {

constexpr double kBitsPerFloat = 32.0;

void require_spd(const Mat& b) {
  if (b.rows() != b.cols()) throw DimMismatch("norm matrix must be square");
  if (!(lambda_min_of(b) > 0.0)) throw NotPSD("norm matrix must be positive definite");
}

Mat symmetric_pinv(const Mat& a, double rel_tol = kDefaultRankTol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  const Vec& ev = es.eigenvalues();
  const double cutoff = rel_tol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Vec inv = Vec::Zero(ev.size());
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (ev(j) > cutoff && ev(j) > 0.0) inv(j) = 1.0 / ev(j);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// B^{1/2} and B^{-1/2} for a positive definite B.
std::pair<Mat, Mat> sqrt_pair(const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(b);
  const Mat& v = es.eigenvectors();
  const Vec s = es.eigenvalues().cwiseSqrt();
  return {v * s.asDiagonal() * v.transpose(), v * s.cwiseInverse().asDiagonal() * v.transpose()};
}

double alpha_from_mean_z(const Mat& b, const Mat& mean_z) {
  const auto [half, inv_half] = sqrt_pair(b);
  const Mat m = half * mean_z * inv_half;
  return std::clamp(1.0 - lambda_min_of(0.5 * (m + m.transpose())), 0.0, 1.0);
}

double log2_binomial(int d, int k) {
  return (std::lgamma(d + 1.0) - std::lgamma(k + 1.0) - std::lgamma(d - k + 1.0)) / std::log(2.0);
}

}  // namespace

Mat optimal_decoder(const Mat& s, const Mat& b) {
  if (s.cols() != b.rows()) throw DimMismatch("sketch columns differ from norm dimension");
  require_spd(b);
  const Eigen::LLT<Mat> llt(b);
  const Mat binv_st = llt.solve(s.transpose());  // B^{-1} S^T
  return binv_st * symmetric_pinv(s * binv_st);
}

Vec optimal_decode(const Mat& s, const Mat& b, const Vec& y) {
  if (y.size() != s.rows()) throw DimMismatch("message length differs from sketch rows");
  return optimal_decoder(s, b) * y;
}

Mat z_matrix(const Mat& s, const Mat& b) { return optimal_decoder(s, b) * s; }

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Eigen::JacobiSVD<Mat> svd(a);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) r += sv(j) > rel_tol * sv(0) ? 1 : 0;
  return r;
}

LinearSketchScheme LinearSketchScheme::fixed(Mat s, Mat b) {
  if (s.cols() != b.rows()) throw DimMismatch("sketch columns differ from norm dimension");
  require_spd(b);
  LinearSketchScheme sch;
  sch.kind_ = SketchSchemeKind::kFixedMatrix;
  sch.s_ = std::move(s);
  sch.b_ = std::move(b);
  return sch;
}

LinearSketchScheme LinearSketchScheme::rotated_sparsifier(Mat b, Vec p) {
  require_spd(b);
  if (p.size() != b.rows()) throw DimMismatch("probability vector length differs from dimension");
  if ((p.array() <= 0.0).any() || (p.array() > 1.0).any()) {
    throw InfeasibleTau("inclusion probabilities must lie in (0, 1]");
  }
  LinearSketchScheme sch;
  sch.kind_ = SketchSchemeKind::kRotatedSparsifier;
  Eigen::SelfAdjointEigenSolver<Mat> es(b);
  sch.q_ = es.eigenvectors();
  sch.b_ = std::move(b);
  sch.p_ = std::move(p);
  return sch;
}

LinearSketchScheme LinearSketchScheme::rotated_uniform(Mat b, double q) {
  const auto d = b.rows();
  return rotated_sparsifier(std::move(b), Vec::Constant(d, q));
}

LinearSketchScheme LinearSketchScheme::custom(Mat b, Sampler sampler) {
  require_spd(b);
  if (!sampler) throw Error("custom scheme needs a sampler");
  LinearSketchScheme sch;
  sch.kind_ = SketchSchemeKind::kCustomSampler;
  sch.b_ = std::move(b);
  sch.sampler_ = std::move(sampler);
  return sch;
}

Mat LinearSketchScheme::draw(Stream& rng) const {
  switch (kind_) {
    case SketchSchemeKind::kFixedMatrix:
      return s_;
    case SketchSchemeKind::kRotatedSparsifier: {
      Mat s = q_.transpose();
      for (int j = 0; j < dim(); ++j) {
        if (!(rng.uniform() < p_(j))) s.row(j).setZero();
      }
      return s;
    }
    case SketchSchemeKind::kCustomSampler: {
      Mat s = sampler_(rng);
      if (s.cols() != dim()) throw DimMismatch("sampled sketch has the wrong column count");
      return s;
    }
  }
  return {};
}

double alpha_of_scheme(const LinearSketchScheme& sch, int trials, Stream& rng) {
  switch (sch.kind()) {
    case SketchSchemeKind::kRotatedSparsifier:
      return 1.0 - sch.probabilities().minCoeff();
    case SketchSchemeKind::kFixedMatrix:
      return alpha_from_mean_z(sch.norm_matrix(), z_matrix(sch.draw(rng), sch.norm_matrix()));
    case SketchSchemeKind::kCustomSampler: {
      if (trials < 1) throw Error("need at least one trial");
      Mat mean = Mat::Zero(sch.dim(), sch.dim());
      for (int t = 0; t < trials; ++t) mean += z_matrix(sch.draw(rng), sch.norm_matrix());
      return alpha_from_mean_z(sch.norm_matrix(), mean / trials);
    }
  }
  return 0.0;
}

double expected_rank(const LinearSketchScheme& sch, int trials, Stream& rng) {
  switch (sch.kind()) {
    case SketchSchemeKind::kRotatedSparsifier:
      return sch.probabilities().sum();
    case SketchSchemeKind::kFixedMatrix:
      return numerical_rank(sch.draw(rng));
    case SketchSchemeKind::kCustomSampler: {
      if (trials < 1) throw Error("need at least one trial");
      double total = 0.0;
      for (int t = 0; t < trials; ++t) total += numerical_rank(sch.draw(rng));
      return total / trials;
    }
  }
  return 0.0;
}

TradeoffAudit tradeoff_audit(const LinearSketchScheme& sch, int trials, Stream& rng, double tol) {
  TradeoffAudit a;
  a.alpha = alpha_of_scheme(sch, trials, rng);
  a.expected_rank_ratio = expected_rank(sch, trials, rng) / sch.dim();
  a.slack = a.alpha + a.expected_rank_ratio - 1.0;
  a.satisfied = a.slack >= -tol;
  a.tight = std::abs(a.slack) <= tol;
  return a;
}

Mat build_optimal_sketch(const Mat& b, double q, Stream& rng) {
  if (!(q > 0.0 && q <= 1.0)) throw InfeasibleTau("inclusion probability must lie in (0, 1]");
  return LinearSketchScheme::rotated_uniform(b, q).draw(rng);
}

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double expected_sparsifier_bits(int d, double q) {
  if (d < 1) throw DimMismatch("dimension must be positive");
  if (q >= 1.0) return kBitsPerFloat * d;
  if (q <= 0.0) return 0.0;
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);
  double total = 0.0;
  for (int k = 0; k <= d; ++k) {
    const double log_pmf = log2_binomial(d, k) * std::log(2.0) + k * lq + (d - k) * l1q;
    total += std::exp(log_pmf) * (kBitsPerFloat * k + log2_binomial(d, k));
  }
  return total;
}

double expected_wire_bits(int d, double q) { return 2.0 * kBitsPerFloat * q * d; }

double linear_bound_alpha(double beta) { return std::max(0.0, 1.0 - beta); }

double general_bound_alpha(double beta) { return std::pow(4.0, -kBitsPerFloat * beta); }

}  // namespace smoothsketch
