#include "smoothsketch/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothsketch/errors.hpp"
#include "smoothsketch/rng.hpp"

namespace smoothsketch {
namespace {

// Logistic scalar smoothness of t -> log(1 + e^t).
constexpr double kLogisticCurvature = 0.25;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

void require_finite(const Vec& x) {
  if (!x.allFinite()) throw NonFinite("non-finite input vector");
}

}  // namespace

double Regularizer::value(const Vec& x) const {
  return kind == RegularizerKind::kL1 ? lambda * x.lpNorm<1>() : 0.0;
}

Vec Regularizer::prox(double gamma, const Vec& v) const { return smoothsketch::prox(*this, gamma, v); }

Vec prox(const Regularizer& r, double gamma, const Vec& v) {
  if (r.kind == RegularizerKind::kZero) return v;
  const double t = gamma * r.lambda;
  Vec out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v(j)) - t;
    out(j) = a > 0.0 ? std::copysign(a, v(j)) : 0.0;
  }
  return out;
}

NodeProblem::NodeProblem(Mat a, Vec b, double mu) : a_(std::move(a)), b_(std::move(b)), mu_(mu) {
  if (a_.rows() != b_.size()) throw DimMismatch("data rows and labels differ in count");
  if (a_.rows() == 0) throw TooFewPoints("node has no datapoints");
  const double m = static_cast<double>(a_.rows());
  Mat l = (kLogisticCurvature / m) * (a_.transpose() * a_);
  l.diagonal().array() += mu_;
  l_ = std::make_shared<const SmoothnessMatrix>(SmoothnessMatrix::from_dense(l));
}

double NodeProblem::value(const Vec& x) const {
  require_finite(x);
  const Vec t = (a_ * x).cwiseProduct(b_);
  double s = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) s += log1p_exp(t(j));
  const double v = s / static_cast<double>(a_.rows()) + 0.5 * mu_ * x.squaredNorm();
  if (!std::isfinite(v)) throw NonFinite("objective value is not finite");
  return v;
}

Vec NodeProblem::grad(const Vec& x) const {
  require_finite(x);
  Vec w = (a_ * x).cwiseProduct(b_);
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = sigmoid(w(j)) * b_(j);
  Vec g = a_.transpose() * w;
  g /= static_cast<double>(a_.rows());
  g += mu_ * x;
  return g;
}

DistributedProblem::DistributedProblem(std::vector<NodeProblem> nodes, Regularizer r)
    : nodes_(std::move(nodes)), r_(r) {
  if (nodes_.empty()) throw TooFewPoints("problem needs at least one node");
  const int d = nodes_.front().dim();
  Mat l = Mat::Zero(d, d);
  for (const NodeProblem& p : nodes_) {
    if (p.dim() != d) throw DimMismatch("nodes disagree on dimension");
    l += p.smoothness().dense();
  }
  l /= static_cast<double>(nodes_.size());
  l_ = std::make_shared<const SmoothnessMatrix>(SmoothnessMatrix::from_dense(l));
}

double DistributedProblem::smooth_value(const Vec& x) const {
  double s = 0.0;
  for (const NodeProblem& p : nodes_) s += p.value(x);
  return s / static_cast<double>(nodes_.size());
}

double DistributedProblem::value(const Vec& x) const { return smooth_value(x) + r_.value(x); }

Vec DistributedProblem::grad(const Vec& x) const {
  Vec g = Vec::Zero(dim());
  for (const NodeProblem& p : nodes_) g += p.grad(x);
  return g / static_cast<double>(nodes_.size());
}

void normalize_rows(Mat& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) *= 0.5 / norm;
  }
}

DistributedProblem partition(const Dataset& data, int n, double mu, std::uint64_t seed,
                             bool normalize) {
  if (n < 1) throw TooFewPoints("node count must be positive");
  if (data.count() < n) {
    throw TooFewPoints(std::to_string(data.count()) + " datapoints for " + std::to_string(n) +
                       " nodes");
  }
  std::vector<int> order(static_cast<std::size_t>(data.count()));
  std::iota(order.begin(), order.end(), 0);
  Stream rng = derive_stream(seed, StreamRole::kShuffle);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  const int m = data.count() / n;
  std::vector<NodeProblem> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Mat a(m, data.dim());
    Vec b(m);
    for (int r = 0; r < m; ++r) {
      const int src = order[static_cast<std::size_t>(i * m + r)];
      a.row(r) = data.rows.row(src);
      b(r) = data.labels(src);
    }
    if (normalize) normalize_rows(a);
    nodes.emplace_back(std::move(a), std::move(b), mu);
  }
  return DistributedProblem(std::move(nodes));
}

DistributedProblem make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.m < 1 || spec.d < 1) throw TooFewPoints("synthetic sizes must be positive");
  Stream rng = derive_stream(spec.seed, StreamRole::kSynthetic);
  std::vector<NodeProblem> nodes;
  nodes.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    Vec col_scale(spec.d);
    for (int j = 0; j < spec.d; ++j) col_scale(j) = std::exp(spec.spread * rng.normal());
    Mat a(spec.m, spec.d);
    Vec b(spec.m);
    for (int r = 0; r < spec.m; ++r) {
      for (int j = 0; j < spec.d; ++j) a(r, j) = col_scale(j) * rng.normal();
      b(r) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
    if (spec.normalize) normalize_rows(a);
    nodes.emplace_back(std::move(a), std::move(b), spec.mu);
  }
  return DistributedProblem(std::move(nodes));
}

ReferenceSolution prox_gradient_solve(const std::function<Vec(const Vec&)>& grad,
                                      const std::function<double(const Vec&)>& value,
                                      double lipschitz, const Regularizer& r, Vec x0, double tol,
                                      int max_iters) {
  if (!(lipschitz > 0.0)) throw Error("step bound requires a positive smoothness constant");
  const double step = 1.0 / lipschitz;
  ReferenceSolution sol;
  sol.x = std::move(x0);
  for (int it = 0; it <= max_iters; ++it) {
    const Vec next = prox(r, step, sol.x - step * grad(sol.x));
    sol.residual = (next - sol.x).norm();
    sol.iterations = it;
    if (sol.residual <= tol) {
      sol.value = value(sol.x);
      return sol;
    }
    sol.x = next;
  }
  throw NoConvergence("prox-gradient residual " + std::to_string(sol.residual) + " after " +
                      std::to_string(max_iters) + " iterations");
}

ReferenceSolution reference_solution(const DistributedProblem& dp, double tol, int max_iters) {
  if (!(dp.mu() > 0.0)) throw Error("reference solution needs mu > 0");
  return prox_gradient_solve([&](const Vec& x) { return dp.grad(x); },
                             [&](const Vec& x) { return dp.value(x); },
                             dp.smoothness().lambda_max(), dp.regularizer(), Vec::Zero(dp.dim()),
                             tol, max_iters);
}

}  // namespace smoothsketch
