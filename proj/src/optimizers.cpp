#include "smoothsketch/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {

Vec step_skgd(const Vec& x, const Vec& grad, const Sampling& s, double gamma, Stream& rng) {
  const DiagonalSketch c = draw_sketch(s, rng);
  Vec cg = Vec::Zero(x.size());
  for (std::size_t k = 0; k < c.active.size(); ++k) {
    cg(c.active[k]) = c.scale[k] * grad(c.active[k]);
  }
  return x - gamma * cg;
}

Vec step_nsync(const Vec& x, const Vec& grad, const Sampling& s, const Vec& v, Stream& rng) {
  const DiagonalSketch c = draw_sketch(s, rng);
  Vec out = x;
  for (const int j : c.active) out(j) = x(j) - (1.0 / v(j)) * grad(j);
  return out;
}

Vec step_cgd_plus(const Vec& x, const Vec& grad, const Compressor& c, double gamma,
                  const Regularizer& r, Stream& rng) {
  if (c.mode() != CompressorMode::kMatrixAware) {
    throw UnsupportedMode("CGD+ needs a matrix-aware compressor");
  }
  const Vec g = c.decompress(c.compress(grad, rng));
  return prox(r, gamma, x - gamma * g);
}

Simulator::Simulator(const DistributedProblem& dp, RunSetup setup, std::uint64_t seed)
    : dp_(dp), setup_(std::move(setup)) {
  const int n = dp_.n();
  const int d = dp_.dim();
  if (setup_.x0.size() == 0) setup_.x0 = Vec::Zero(d);
  if (setup_.x0.size() != d) throw DimMismatch("x0 dimension differs from problem");
  if (setup_.xstar && setup_.xstar->size() != d) throw DimMismatch("x* dimension differs from problem");
  const Method m = setup_.method;

  if (!is_distributed(m)) {
    if (setup_.master) {
      single_sampling_ = *setup_.master;
    } else if (!setup_.samplings.empty()) {
      single_sampling_ = setup_.samplings.front();
    } else {
      throw ConfigError("single-node method needs a sampling");
    }
    if (single_sampling_.dim() != d) throw DimMismatch("sampling dimension differs from problem");
    node_rng_.push_back(derive_stream(seed, StreamRole::kNodeUplink, 0));
    if (m == Method::kNSync) nsync_v_ = nsync_eso_params(dp_.smoothness(), single_sampling_);
    if (m == Method::kCGDPlus) {
      comp_.push_back(Compressor::matrix_aware(dp_.smoothness_ptr(), single_sampling_));
    }
  } else {
    if (static_cast<int>(setup_.samplings.size()) != n) {
      throw ConfigError("need one sampling per node");
    }
    for (int i = 0; i < n; ++i) {
      const Sampling& s = setup_.samplings[static_cast<std::size_t>(i)];
      if (s.dim() != d) throw DimMismatch("sampling dimension differs from problem");
      comp_.push_back(is_baseline(m) ? Compressor::standard(s)
                                     : Compressor::matrix_aware(dp_.node(i).smoothness_ptr(), s));
      node_rng_.push_back(derive_stream(seed, StreamRole::kNodeUplink, static_cast<std::uint64_t>(i)));
    }
    if (m == Method::kDIANAPlusPlus) {
      if (!setup_.master) throw ConfigError("DIANA++ needs a master sampling");
      if (setup_.master->dim() != d) throw DimMismatch("master sampling dimension differs");
      master_comp_ = Compressor::matrix_aware(dp_.smoothness_ptr(), *setup_.master);
    }
  }
  master_rng_ = derive_stream(seed, StreamRole::kMaster);
  coin_rng_ = derive_stream(seed, StreamRole::kCoin);

  x_ = y_ = z_ = w_ = setup_.x0;
  h_.assign(static_cast<std::size_t>(n), Vec::Zero(d));
  hbar_ = Vec::Zero(d);
  master_h_ = Vec::Zero(d);
  last_g_ = Vec::Zero(d);
}

const Vec& Simulator::model() const noexcept {
  const Method m = setup_.method;
  return (m == Method::kADIANA || m == Method::kADIANAPlus) ? y_ : x_;
}

TraceRow Simulator::row() const {
  TraceRow r;
  r.iter = iter_;
  r.coords_up = coords_up_;
  r.coords_down = coords_down_;
  r.bits_up = bits_up_;
  r.bits_down = bits_down_;
  const Vec& m = model();
  if (setup_.xstar) r.residual = (m - *setup_.xstar).squaredNorm();
  if (std::isfinite(setup_.fstar)) r.fgap = dp_.value(m) - setup_.fstar;
  r.wall_seconds = wall_;
  return r;
}

void Simulator::step() {
  const auto t0 = std::chrono::steady_clock::now();
  switch (setup_.method) {
    case Method::kSkGD:
    case Method::kNSync:
    case Method::kCGDPlus:
      step_single_node();
      break;
    case Method::kDCGD:
    case Method::kDCGDPlus:
      step_dcgd();
      break;
    case Method::kDIANA:
    case Method::kDIANAPlus:
      step_diana(false);
      break;
    case Method::kISEGAPlus:
      step_diana(true);
      break;
    case Method::kADIANA:
    case Method::kADIANAPlus:
      step_adiana();
      break;
    case Method::kDIANAPlusPlus:
      step_diana_pp();
      break;
  }
  ++iter_;
  wall_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void Simulator::step_single_node() {
  const Vec g = dp_.grad(x_);
  Stream& rng = node_rng_.front();
  // Count the sketch size on a copy of the stream so the step itself draws
  // from the untouched one.
  Stream probe = rng;
  const auto sent = static_cast<std::uint64_t>(draw_sketch(single_sampling_, probe).active.size());
  switch (setup_.method) {
    case Method::kSkGD:
      x_ = step_skgd(x_, g, single_sampling_, setup_.params.gamma, rng);
      break;
    case Method::kNSync:
      x_ = step_nsync(x_, g, single_sampling_, nsync_v_, rng);
      break;
    default:
      x_ = step_cgd_plus(x_, g, comp_.front(), setup_.params.gamma, dp_.regularizer(), rng);
      break;
  }
  last_g_ = g;
  coords_up_ += sent;
  bits_up_ += sent * (kBitsPerValue + kBitsPerIndex);
}

Vec Simulator::node_compress_decompress(int i, const Vec& v, SparseUpdate* msg) {
  const auto idx = static_cast<std::size_t>(i);
  SparseUpdate u = comp_[idx].compress(v, node_rng_[idx]);
  coords_up_ += u.payload_coords();
  bits_up_ += u.payload_bits();
  Vec out = comp_[idx].decompress(u);
  if (msg) *msg = std::move(u);
  return out;
}

void Simulator::step_dcgd() {
  const int n = dp_.n();
  Vec sum = Vec::Zero(dp_.dim());
  for (int i = 0; i < n; ++i) sum += node_compress_decompress(i, dp_.node(i).grad(x_), nullptr);
  last_g_ = sum / n;
  const double gamma = setup_.params.gamma;
  x_ = prox(dp_.regularizer(), gamma, x_ - gamma * last_g_);
}

void Simulator::step_diana(bool isega) {
  const int n = dp_.n();
  const int d = dp_.dim();
  const double alpha = setup_.params.alpha;
  Vec sum = Vec::Zero(d);
  Vec shift_sum = Vec::Zero(d);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    SparseUpdate msg;
    const Vec delta_bar = node_compress_decompress(i, dp_.node(i).grad(x_) - h_[idx], &msg);
    sum += delta_bar;
    if (isega) {
      // L_i^{1/2} Diag(P_i) Delta_i.
      const Vec& p = comp_[idx].sampling().probabilities();
      for (std::size_t k = 0; k < msg.indices.size(); ++k) msg.values[k] *= p(msg.indices[k]);
      const Vec step = comp_[idx].decompress(msg);
      h_[idx] += step;
      shift_sum += step;
    } else {
      h_[idx] += alpha * delta_bar;
    }
  }
  const Vec delta_mean = sum / n;
  last_g_ = hbar_ + delta_mean;
  const double gamma = setup_.params.gamma;
  x_ = prox(dp_.regularizer(), gamma, x_ - gamma * last_g_);
  if (isega) {
    hbar_ += shift_sum / n;
  } else {
    hbar_ += alpha * delta_mean;
  }
}

void Simulator::step_adiana() {
  const MethodParams& mp = setup_.params;
  const int n = dp_.n();
  const int d = dp_.dim();
  x_ = mp.theta1 * z_ + mp.theta2 * w_ + (1.0 - mp.theta1 - mp.theta2) * y_;
  Vec sum_x = Vec::Zero(d);
  Vec sum_w = Vec::Zero(d);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const NodeProblem& node = dp_.node(i);
    const Compressor& c = comp_[idx];
    // Both messages of a round share one sketch.
    const DiagonalSketch sk =
        c.mode() == CompressorMode::kIdentity ? DiagonalSketch{} : draw_sketch(c.sampling(), node_rng_[idx]);
    const SparseUpdate ux = c.compress_with(node.grad(x_) - h_[idx], sk);
    const SparseUpdate uw = c.compress_with(node.grad(w_) - h_[idx], sk);
    coords_up_ += ux.payload_coords() + uw.payload_coords();
    bits_up_ += ux.payload_bits() + uw.payload_bits();
    sum_x += c.decompress(ux);
    const Vec small_delta_bar = c.decompress(uw);
    sum_w += small_delta_bar;
    h_[idx] += mp.alpha * small_delta_bar;
  }
  last_g_ = sum_x / n + hbar_;
  hbar_ += mp.alpha * (sum_w / n);
  const Vec y_next = prox(dp_.regularizer(), mp.eta, x_ - mp.eta * last_g_);
  z_ = mp.beta * z_ + (1.0 - mp.beta) * x_ + (mp.gamma / mp.eta) * (y_next - x_);
  if (coin_rng_.uniform() < mp.q) w_ = y_;
  y_ = y_next;
}

void Simulator::step_diana_pp() {
  const int n = dp_.n();
  const int d = dp_.dim();
  const MethodParams& mp = setup_.params;
  Vec sum = Vec::Zero(d);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Vec delta_bar = node_compress_decompress(i, dp_.node(i).grad(x_) - h_[idx], nullptr);
    sum += delta_bar;
    h_[idx] += mp.alpha * delta_bar;
  }
  const Vec delta_mean = sum / n;
  const Vec g = hbar_ + delta_mean;

  const Compressor& mc = *master_comp_;
  Vec g_hat;
  Vec master_step;
  if (mc.sampling().kind() == SamplingKind::kFull) {
    // Uncompressed broadcast: g-hat is g itself.
    const SparseUpdate u = Compressor::identity(d).compress_with(g, DiagonalSketch{});
    coords_down_ += u.payload_coords();
    bits_down_ += u.value_bits();
    g_hat = g;
    master_step = g - master_h_;
  } else {
    const SparseUpdate u = mc.compress(g - master_h_, master_rng_);
    coords_down_ += u.payload_coords();
    bits_down_ += u.payload_bits();
    master_step = mc.decompress(u);
    g_hat = master_h_ + master_step;
  }
  last_g_ = g_hat;
  x_ = prox(dp_.regularizer(), mp.gamma, x_ - mp.gamma * g_hat);
  hbar_ += mp.alpha * delta_mean;
  master_h_ += mp.beta * master_step;
}

RunTrace run_seed(const DistributedProblem& dp, const RunSetup& setup, std::uint64_t seed) {
  Simulator sim(dp, setup, seed);
  RunTrace trace;
  trace.seed = seed;
  trace.rows.push_back(sim.row());
  const bool use_residual = setup.xstar.has_value();
  auto metric = [&](const TraceRow& r) { return use_residual ? r.residual : r.fgap; };
  const double initial = metric(trace.rows.front());
  for (int k = 0; k < setup.iters; ++k) {
    const double current = metric(trace.rows.back());
    if (setup.target > 0.0 && current < setup.target) break;
    sim.step();
    trace.rows.push_back(sim.row());
    const double now = metric(trace.rows.back());
    if (!std::isfinite(sim.model().sum()) ||
        (std::isfinite(initial) && initial > 0.0 && now > setup.divergence_factor * initial)) {
      trace.diverged = true;
      break;
    }
  }
  return trace;
}

RunResult run(const DistributedProblem& dp, const RunSetup& setup,
              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  RunResult res;
  std::size_t longest = 0;
  for (const std::uint64_t seed : seeds) {
    res.per_seed.push_back(run_seed(dp, setup, seed));
    longest = std::max(longest, res.per_seed.back().rows.size());
    res.mean.diverged = res.mean.diverged || res.per_seed.back().diverged;
  }
  const double count = static_cast<double>(seeds.size());
  for (std::size_t k = 0; k < longest; ++k) {
    double up = 0, down = 0, bup = 0, bdown = 0, resid = 0, gap = 0, wall = 0;
    for (const RunTrace& t : res.per_seed) {
      const TraceRow& r = t.rows[std::min(k, t.rows.size() - 1)];
      up += static_cast<double>(r.coords_up);
      down += static_cast<double>(r.coords_down);
      bup += static_cast<double>(r.bits_up);
      bdown += static_cast<double>(r.bits_down);
      resid += r.residual;
      gap += r.fgap;
      wall += r.wall_seconds;
    }
    TraceRow m;
    m.iter = static_cast<int>(k);
    m.coords_up = static_cast<std::uint64_t>(std::llround(up / count));
    m.coords_down = static_cast<std::uint64_t>(std::llround(down / count));
    m.bits_up = static_cast<std::uint64_t>(std::llround(bup / count));
    m.bits_down = static_cast<std::uint64_t>(std::llround(bdown / count));
    m.residual = resid / count;
    m.fgap = gap / count;
    m.wall_seconds = wall / count;
    res.mean.rows.push_back(m);
  }
  return res;
}

}  // namespace smoothsketch
