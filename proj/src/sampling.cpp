#include "smoothsketch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {
namespace {

constexpr int kMaxBisection = 200;
constexpr double kFloorScale = 1e-6;

void require_tau(double tau, int d) {
  if (!(tau > 0.0) || tau > static_cast<double>(d)) {
    throw InfeasibleTau("tau = " + std::to_string(tau) + " outside (0, " + std::to_string(d) +
                        "]");
  }
}

// Finds rho >= 0 with sum_j prob(w_j, rho) = tau, where prob is decreasing in
// rho and equals 1 at rho = 0. Bisection runs to float resolution.
ProbabilitySolution bisect_balance(const Vec& w, double tau, double upper,
                                   const std::function<double(double, double)>& prob) {
  const Eigen::Index d = w.size();
  ProbabilitySolution sol;
  sol.p = Vec::Ones(d);
  if (tau >= static_cast<double>(d)) return sol;

  auto total = [&](double rho) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) s += prob(w(j), rho);
    return s;
  };

  double lo = 0.0;
  double hi = upper;
  while (total(hi) > tau) hi *= 2.0;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (total(mid) > tau) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rho = std::abs(total(lo) - tau) <= std::abs(total(hi) - tau) ? lo : hi;
  sol.rho = rho;
  for (Eigen::Index j = 0; j < d; ++j) sol.p(j) = prob(w(j), rho);
  return sol;
}

double linear_prob(double w, double rho) { return w / (w + rho); }
double sqrt_prob(double w, double rho) { return std::sqrt(w / (w + rho)); }

Vec shifted_curvature(const Vec& l_diag, double mu, int n) {
  if (!(mu > 0.0)) throw InfeasibleTau("mu must be positive");
  if (n < 1) throw InfeasibleTau("n must be at least 1");
  return (l_diag.array() / (mu * n) + 1.0).matrix();
}

void require_nonnegative(const Vec& l_diag) {
  for (Eigen::Index j = 0; j < l_diag.size(); ++j) {
    if (!(l_diag(j) >= 0.0)) throw InfeasibleTau("curvature entries must be nonnegative");
  }
}

}  // namespace

Sampling Sampling::independent(Vec p) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (!(p(j) > 0.0) || p(j) > 1.0) {
      throw InfeasibleTau("independent sampling needs 0 < p_j <= 1 (j = " + std::to_string(j) +
                          ")");
    }
  }
  Sampling s;
  s.kind_ = SamplingKind::kIndependent;
  s.p_ = std::move(p);
  return s;
}

Sampling Sampling::serial(Vec p) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (!(p(j) > 0.0)) throw InfeasibleTau("serial sampling needs p_j > 0");
  }
  if (std::abs(p.sum() - 1.0) > 1e-12) throw InfeasibleTau("serial sampling needs sum p = 1");
  Sampling s;
  s.kind_ = SamplingKind::kSerialWeighted;
  s.p_ = std::move(p);
  return s;
}

Sampling Sampling::full(int d) {
  Sampling s;
  s.kind_ = SamplingKind::kFull;
  s.p_ = Vec::Ones(d);
  return s;
}

double Sampling::omega() const {
  if (p_.size() == 0) return 0.0;
  return 1.0 / p_.minCoeff() - 1.0;
}

ProbabilityMatrices probability_matrices(const Sampling& s) {
  const int d = s.dim();
  const Vec& p = s.probabilities();
  ProbabilityMatrices m;
  switch (s.kind()) {
    case SamplingKind::kFull:
      m.P = Mat::Ones(d, d);
      m.Pbar = Mat::Ones(d, d);
      m.Ptilde = Mat::Zero(d, d);
      break;
    case SamplingKind::kIndependent:
      m.P = p * p.transpose();
      m.Pbar = Mat::Ones(d, d);
      m.Ptilde = Mat::Zero(d, d);
      for (int j = 0; j < d; ++j) {
        m.P(j, j) = p(j);
        m.Pbar(j, j) = 1.0 / p(j);
        m.Ptilde(j, j) = 1.0 / p(j) - 1.0;
      }
      break;
    case SamplingKind::kSerialWeighted:
      m.P = p.asDiagonal();
      m.Pbar = Mat::Zero(d, d);
      m.Ptilde = Mat::Constant(d, d, -1.0);
      for (int j = 0; j < d; ++j) {
        m.Pbar(j, j) = 1.0 / p(j);
        m.Ptilde(j, j) = 1.0 / p(j) - 1.0;
      }
      break;
  }
  return m;
}

Vec DiagonalSketch::apply(const Vec& x) const {
  Vec out = Vec::Zero(dim);
  for (std::size_t k = 0; k < active.size(); ++k) {
    out(active[k]) = scale[k] * x(active[k]);
  }
  return out;
}

Mat DiagonalSketch::dense() const {
  Mat out = Mat::Zero(dim, dim);
  for (std::size_t k = 0; k < active.size(); ++k) out(active[k], active[k]) = scale[k];
  return out;
}

DiagonalSketch draw_sketch(const Sampling& s, Stream& rng) {
  DiagonalSketch c;
  c.dim = s.dim();
  const Vec& p = s.probabilities();
  switch (s.kind()) {
    case SamplingKind::kFull:
      c.active.reserve(static_cast<std::size_t>(c.dim));
      for (int j = 0; j < c.dim; ++j) {
        c.active.push_back(j);
        c.scale.push_back(1.0);
      }
      break;
    case SamplingKind::kIndependent:
      for (int j = 0; j < c.dim; ++j) {
        if (rng.uniform() < p(j)) {
          c.active.push_back(j);
          c.scale.push_back(1.0 / p(j));
        }
      }
      break;
    case SamplingKind::kSerialWeighted: {
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = c.dim - 1;
      for (int j = 0; j < c.dim; ++j) {
        acc += p(j);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      c.active.push_back(pick);
      c.scale.push_back(1.0 / p(pick));
      break;
    }
  }
  return c;
}

ProbabilitySolution solve_dcgd_probs(const Vec& l_diag, double tau) {
  const int d = static_cast<int>(l_diag.size());
  require_tau(tau, d);
  require_nonnegative(l_diag);

  std::vector<int> positive;
  for (int j = 0; j < d; ++j) {
    if (l_diag(j) > 0.0) positive.push_back(j);
  }
  if (positive.empty()) throw InfeasibleTau("at least one curvature entry must be positive");
  const int zeros = d - static_cast<int>(positive.size());
  if (zeros == 0) {
    return bisect_balance(l_diag, tau, l_diag.sum() / tau, linear_prob);
  }

  // Zero rows carry no gradient mass; give them a floor probability and
  // spend the remaining budget on the positive coordinates.
  const double floor = std::min(1.0, tau / d) * kFloorScale;
  const int k = static_cast<int>(positive.size());
  ProbabilitySolution sol;
  sol.p = Vec::Constant(d, floor);
  const double budget = tau - zeros * floor;
  if (budget >= k) {
    for (int j : positive) sol.p(j) = 1.0;
    const double rest = (tau - k) / zeros;
    for (int j = 0; j < d; ++j) {
      if (l_diag(j) == 0.0) sol.p(j) = std::max(floor, std::min(1.0, rest));
    }
    sol.rho = 0.0;
    return sol;
  }
  Vec sub(k);
  for (int i = 0; i < k; ++i) sub(i) = l_diag(positive[static_cast<std::size_t>(i)]);
  const ProbabilitySolution inner = bisect_balance(sub, budget, sub.sum() / budget, linear_prob);
  for (int i = 0; i < k; ++i) sol.p(positive[static_cast<std::size_t>(i)]) = inner.p(i);
  sol.rho = inner.rho;
  return sol;
}

ProbabilitySolution solve_diana_probs(const Vec& l_diag, double tau, double mu, int n) {
  const int d = static_cast<int>(l_diag.size());
  require_tau(tau, d);
  require_nonnegative(l_diag);
  const Vec w = shifted_curvature(l_diag, mu, n);
  return bisect_balance(w, tau, w.sum() / tau, linear_prob);
}

ProbabilitySolution solve_adiana_probs(const Vec& l_diag, double tau, double mu, int n) {
  const int d = static_cast<int>(l_diag.size());
  require_tau(tau, d);
  require_nonnegative(l_diag);
  const Vec w = shifted_curvature(l_diag, mu, n);
  // sum_j sqrt(w_j / rho) <= sqrt(d sum w / rho) <= tau once rho >= d sum w / tau^2.
  return bisect_balance(w, tau, d * w.sum() / (tau * tau), sqrt_prob);
}

Sampling uniform_sampling(int d, double tau) {
  require_tau(tau, d);
  if (tau == static_cast<double>(d)) return Sampling::independent(Vec::Ones(d));
  return Sampling::independent(Vec::Constant(d, tau / d));
}

double independent_ltilde(const Vec& p, const Vec& l_diag) {
  if (p.size() != l_diag.size()) throw DimMismatch("independent_ltilde: size mismatch");
  double best = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    best = std::max(best, (1.0 / p(j) - 1.0) * l_diag(j));
  }
  return best;
}

}  // namespace smoothsketch
