#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smoothsketch/compression.hpp"
#include "smoothsketch/constants.hpp"
#include "smoothsketch/problem.hpp"
#include "smoothsketch/rng.hpp"
#include "smoothsketch/sampling.hpp"

namespace smoothsketch {

// Single-node steps. grad is the gradient at x.

// x - gamma C grad.
Vec step_skgd(const Vec& x, const Vec& grad, const Sampling& s, double gamma, Stream& rng);
// x_j - grad_j / v_j on the drawn set.
Vec step_nsync(const Vec& x, const Vec& grad, const Sampling& s, const Vec& v, Stream& rng);
// prox(x - gamma L^{1/2} C L^{dagger 1/2} grad); c must be matrix-aware.
Vec step_cgd_plus(const Vec& x, const Vec& grad, const Compressor& c, double gamma,
                  const Regularizer& r, Stream& rng);

struct TraceRow {
  int iter = 0;
  std::uint64_t coords_up = 0;
  std::uint64_t coords_down = 0;
  std::uint64_t bits_up = 0;
  std::uint64_t bits_down = 0;
  double residual = kNaN;  // ||x - x*||^2
  double fgap = kNaN;      // F(x) - F*
  double wall_seconds = 0.0;
};

struct RunTrace {
  std::uint64_t seed = 0;
  bool diverged = false;
  std::vector<TraceRow> rows;
};

struct RunSetup {
  Method method = Method::kDIANAPlus;
  std::vector<Sampling> samplings;  // one per node
  // Master sketch for DIANA++; the sampling of single-node methods (falls
  // back to samplings[0]).
  std::optional<Sampling> master;
  MethodParams params;
  Vec x0;
  std::optional<Vec> xstar;
  double fstar = kNaN;
  int iters = 100;
  // Stop once the residual (or the f-gap when x* is unknown) drops below.
  double target = 0.0;
  // Abort when the residual exceeds this multiple of its initial value.
  double divergence_factor = 1e6;
};

// Simulated server and nodes for one seed. Node streams, the master stream
// and the ADIANA coin are derived independently from the seed, so e.g. the
// master's draws never perturb the nodes'.
class Simulator {
 public:
  Simulator(const DistributedProblem& dp, RunSetup setup, std::uint64_t seed);

  void step();
  int iteration() const noexcept { return iter_; }

  // Model reported in traces: x for most methods, y for the ADIANA family.
  const Vec& model() const noexcept;
  const Vec& x() const noexcept { return x_; }
  const Vec& y() const noexcept { return y_; }
  const Vec& z() const noexcept { return z_; }
  const Vec& w() const noexcept { return w_; }
  const Vec& shift(int i) const { return h_.at(static_cast<std::size_t>(i)); }
  const Vec& mean_shift() const noexcept { return hbar_; }
  const Vec& master_shift() const noexcept { return master_h_; }
  // Last aggregated gradient estimator (g, or g-hat for DIANA++).
  const Vec& last_estimator() const noexcept { return last_g_; }

  TraceRow row() const;

 private:
  void step_single_node();
  void step_dcgd();
  void step_diana(bool isega);
  void step_adiana();
  void step_diana_pp();
  Vec node_compress_decompress(int i, const Vec& v, SparseUpdate* msg);

  const DistributedProblem& dp_;
  RunSetup setup_;
  int iter_ = 0;
  std::vector<Compressor> comp_;
  std::vector<Stream> node_rng_;
  Stream master_rng_;
  Stream coin_rng_;
  std::optional<Compressor> master_comp_;
  Sampling single_sampling_;
  Vec nsync_v_;
  Vec x_, y_, z_, w_;
  std::vector<Vec> h_;
  Vec hbar_;
  Vec master_h_;
  Vec last_g_;
  std::uint64_t coords_up_ = 0;
  std::uint64_t coords_down_ = 0;
  std::uint64_t bits_up_ = 0;
  std::uint64_t bits_down_ = 0;
  double wall_ = 0.0;
};

// One seed, rows for iterations 0..iters (shorter on early stop/divergence).
RunTrace run_seed(const DistributedProblem& dp, const RunSetup& setup, std::uint64_t seed);

struct RunResult {
  std::vector<RunTrace> per_seed;
  // Row-wise mean; traces that stopped early contribute their final row.
  RunTrace mean;
};

RunResult run(const DistributedProblem& dp, const RunSetup& setup,
              const std::vector<std::uint64_t>& seeds);

}  // namespace smoothsketch
