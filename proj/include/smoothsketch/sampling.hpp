#pragma once

#include <vector>

#include "smoothsketch/psd.hpp"
#include "smoothsketch/rng.hpp"

namespace smoothsketch {

enum class SamplingKind {
  kIndependent,     // coordinate j included independently with probability p_j
  kSerialWeighted,  // exactly one coordinate, drawn with probability p_j
  kFull,            // every coordinate, always
};

// Proper sampling over the coordinates {0, ..., d-1}.
class Sampling {
 public:
  Sampling() = default;

  // Throws InfeasibleTau unless 0 < p_j <= 1 for all j.
  static Sampling independent(Vec p);
  // Throws InfeasibleTau unless p_j > 0 and sum p = 1 within 1e-12.
  static Sampling serial(Vec p);
  static Sampling full(int d);

  SamplingKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(p_.size()); }
  const Vec& probabilities() const noexcept { return p_; }
  // Expected number of sampled coordinates.
  double tau() const { return p_.sum(); }
  // Variance of the induced sparsifier, max_j 1/p_j - 1.
  double omega() const;

 private:
  SamplingKind kind_ = SamplingKind::kFull;
  Vec p_;
};

struct ProbabilityMatrices {
  Mat P;       // P_jl = Prob({j,l} in S)
  Mat Pbar;    // P_jl / (p_j p_l)
  Mat Ptilde;  // Pbar - ones
};

ProbabilityMatrices probability_matrices(const Sampling& s);

// Random diagonal matrix with 1/p_j on the sampled set and zero elsewhere.
struct DiagonalSketch {
  int dim = 0;
  std::vector<int> active;   // strictly increasing
  std::vector<double> scale; // 1/p_j for each active j

  Vec apply(const Vec& x) const;
  Mat dense() const;
};

// Independent: one uniform draw per coordinate; serial: one draw total; full:
// no draws. The stream is the only mutated state.
DiagonalSketch draw_sketch(const Sampling& s, Stream& rng);

struct ProbabilitySolution {
  Vec p;
  double rho = 0.0;
};

// p_j = L_j / (L_j + rho) with sum p = tau. Zero-curvature coordinates get a
// small floor probability so the sampling stays proper.
ProbabilitySolution solve_dcgd_probs(const Vec& l_diag, double tau);
// Same balance applied to L'_j = L_j / (mu n) + 1.
ProbabilitySolution solve_diana_probs(const Vec& l_diag, double tau, double mu, int n);
// p_j = sqrt(L'_j / (L'_j + rho)) with sum p = tau.
ProbabilitySolution solve_adiana_probs(const Vec& l_diag, double tau, double mu, int n);

// Independent sampling with p_j = tau / d.
Sampling uniform_sampling(int d, double tau);

// Closed form lambda_max(Ptilde o L) = max_j (1/p_j - 1) L_jj for independent
// samplings.
double independent_ltilde(const Vec& p, const Vec& l_diag);

}  // namespace smoothsketch
