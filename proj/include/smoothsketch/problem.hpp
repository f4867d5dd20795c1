#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smoothsketch/psd.hpp"

namespace smoothsketch {

// Rows of a LibSVM file, densified. Labels are in {-1, +1}.
struct Dataset {
  Mat rows;  // count x dim
  Vec labels;
  int dim() const noexcept { return static_cast<int>(rows.cols()); }
  int count() const noexcept { return static_cast<int>(rows.rows()); }
};

// Parses "label idx:val idx:val ..." lines with 1-based indices. Two-valued
// label sets other than {-1,+1} map their smaller value to -1. Blank lines and
// '#' comments are skipped. Throws ParseError(line, reason) or EmptyFile.
Dataset parse_libsvm(std::string_view text, int min_dim = 0);
Dataset read_libsvm_file(const std::string& path, int min_dim = 0);

enum class RegularizerKind { kZero, kL1 };

struct Regularizer {
  RegularizerKind kind = RegularizerKind::kZero;
  double lambda = 0.0;

  double value(const Vec& x) const;
  // prox_{gamma R}(v).
  Vec prox(double gamma, const Vec& v) const;
};

// Soft-threshold / identity proximal operator.
Vec prox(const Regularizer& r, double gamma, const Vec& v);

// f_i(x) = (1/m) sum_j log(1 + exp(b_j a_j^T x)) + (mu/2) ||x||^2.
class NodeProblem {
 public:
  NodeProblem(Mat a, Vec b, double mu);

  int dim() const noexcept { return static_cast<int>(a_.cols()); }
  int samples() const noexcept { return static_cast<int>(a_.rows()); }
  double mu() const noexcept { return mu_; }
  const Mat& data() const noexcept { return a_; }
  const Vec& labels() const noexcept { return b_; }

  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;
  // (1/(4m)) A^T A + mu I.
  const SmoothnessMatrix& smoothness() const noexcept { return *l_; }
  std::shared_ptr<const SmoothnessMatrix> smoothness_ptr() const noexcept { return l_; }

 private:
  Mat a_;
  Vec b_;
  double mu_;
  std::shared_ptr<const SmoothnessMatrix> l_;
};

// f = (1/n) sum_i f_i, plus an optional nonsmooth R.
class DistributedProblem {
 public:
  DistributedProblem(std::vector<NodeProblem> nodes, Regularizer r = {});

  int n() const noexcept { return static_cast<int>(nodes_.size()); }
  int dim() const noexcept { return nodes_.front().dim(); }
  double mu() const noexcept { return nodes_.front().mu(); }
  const std::vector<NodeProblem>& nodes() const noexcept { return nodes_; }
  const NodeProblem& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const Regularizer& regularizer() const noexcept { return r_; }
  void set_regularizer(Regularizer r) { r_ = r; }

  // (1/n) sum L_i.
  const SmoothnessMatrix& smoothness() const noexcept { return *l_; }
  std::shared_ptr<const SmoothnessMatrix> smoothness_ptr() const noexcept { return l_; }

  double smooth_value(const Vec& x) const;
  // f(x) + R(x).
  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;

 private:
  std::vector<NodeProblem> nodes_;
  Regularizer r_;
  std::shared_ptr<const SmoothnessMatrix> l_;
};

// Rescales every nonzero row to Euclidean norm 1/2.
void normalize_rows(Mat& rows);

// Shuffles with the seed, drops the tail so every node holds floor(count/n)
// rows, optionally normalizes rows, and builds each L_i. Throws TooFewPoints.
DistributedProblem partition(const Dataset& data, int n, double mu, std::uint64_t seed,
                             bool normalize = true);

struct SyntheticSpec {
  int n = 5;
  int m = 20;  // rows per node
  int d = 10;
  double mu = 1e-2;
  std::uint64_t seed = 1;
  // Column j of node i is scaled by exp(spread * z_ij) before normalization,
  // giving heterogeneous diagonals across coordinates and nodes.
  double spread = 1.0;
  bool normalize = true;
};

// Gaussian rows with random labels.
DistributedProblem make_synthetic(const SyntheticSpec& spec);

struct ReferenceSolution {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Proximal gradient descent with step 1/lipschitz until
// ||x - prox(x - step grad(x))|| <= tol. Throws NoConvergence.
ReferenceSolution prox_gradient_solve(const std::function<Vec(const Vec&)>& grad,
                                      const std::function<double(const Vec&)>& value,
                                      double lipschitz, const Regularizer& r, Vec x0, double tol,
                                      int max_iters);

// Minimizer of f + R by prox_gradient_solve with step 1/lambda_max(L).
ReferenceSolution reference_solution(const DistributedProblem& dp, double tol = 1e-12,
                                     int max_iters = 2'000'000);

}  // namespace smoothsketch
