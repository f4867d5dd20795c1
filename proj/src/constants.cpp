#include "smoothsketch/constants.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "smoothsketch/errors.hpp"

namespace smoothsketch {
namespace {

double expected_smoothness(const Sampling& s, const Mat& l) {
  if (s.kind() == SamplingKind::kFull) return 0.0;
  return std::max(0.0, lambda_max_of(hadamard(probability_matrices(s).Ptilde, l)));
}

void require(double v, const char* name) {
  if (!std::isfinite(v)) throw MissingConstant(std::string("constant ") + name + " is not available");
}

struct AdianaInputs {
  double L;
  double ltilde_max;
  double omega_max;
  int n;
};

MethodParams adiana_params(const AdianaInputs& in, double mu, double factor) {
  MethodParams mp;
  const double n = in.n;
  mp.alpha = 1.0 / (1.0 + in.omega_max);
  if (in.ltilde_max > 0.0) {
    const double r = std::max(1.0, std::sqrt(n * in.L / (32.0 * in.ltilde_max)) - 1.0);
    mp.q = std::min(1.0, r / (2.0 * (1.0 + in.omega_max)));
    const double k = 2.0 * mp.q * (in.omega_max + 1.0) + 1.0;
    mp.eta = std::min(1.0 / (2.0 * in.L), n / (64.0 * in.ltilde_max * k * k));
  } else {
    mp.q = 1.0;
    mp.eta = 1.0 / (2.0 * in.L);
  }
  mp.eta *= factor;
  mp.theta1 = std::min(0.25, std::sqrt(mp.eta * mu / mp.q));
  mp.theta2 = 0.5;
  mp.gamma = mp.eta / (2.0 * (mp.theta1 + mp.eta * mu));
  mp.beta = 1.0 - mp.gamma * mu;
  return mp;
}

}  // namespace

double nu_s(const std::vector<Vec>& diagonals, double s) {
  double best = 0.0;
  for (const Vec& diag : diagonals) {
    const Vec powered = diag.cwiseMax(0.0).array().pow(1.0 / s).matrix();
    const double mx = powered.maxCoeff();
    if (mx > 0.0) best = std::max(best, powered.sum() / mx);
  }
  return best;
}

RateConstants compute_constants(const DistributedProblem& dp, const std::vector<Sampling>& samplings,
                                const std::optional<Sampling>& master,
                                const std::optional<Vec>& xstar) {
  if (static_cast<int>(samplings.size()) != dp.n()) {
    throw DimMismatch("need one sampling per node");
  }
  RateConstants rc;
  rc.n = dp.n();
  rc.d = dp.dim();
  const SmoothnessMatrix& global = dp.smoothness();
  rc.L = global.lambda_max();

  double sum_li = 0.0;
  std::vector<Vec> diagonals;
  for (int i = 0; i < rc.n; ++i) {
    const SmoothnessMatrix& li = dp.node(i).smoothness();
    const Sampling& s = samplings[static_cast<std::size_t>(i)];
    if (s.dim() != rc.d) throw DimMismatch("sampling dimension differs from problem");
    rc.L_max = std::max(rc.L_max, li.lambda_max());
    sum_li += li.lambda_max();
    rc.Ltilde_i.push_back(expected_smoothness(s, li.dense()));
    rc.omega_i.push_back(s.omega());
    diagonals.push_back(li.dense().diagonal());
  }
  rc.Ltilde_max = *std::max_element(rc.Ltilde_i.begin(), rc.Ltilde_i.end());
  rc.omega_max = *std::max_element(rc.omega_i.begin(), rc.omega_i.end());
  rc.nu = rc.L_max > 0.0 ? sum_li / rc.L_max : 0.0;
  rc.nu1 = nu_s(diagonals, 1.0);
  rc.nu2 = nu_s(diagonals, 2.0);

  const Sampling* single = master ? &*master : (rc.n == 1 ? &samplings.front() : nullptr);
  if (single) {
    if (single->dim() != rc.d) throw DimMismatch("master sampling dimension differs from problem");
    const Mat pbar_l = hadamard(probability_matrices(*single).Pbar, global.dense());
    rc.Lbar = lambda_max_of(pbar_l);
    rc.Ltilde = expected_smoothness(*single, global.dense());
    rc.omega_master = single->omega();
  }

  if (master) {
    DianaPlusPlusConstants pp;
    for (int i = 0; i < rc.n; ++i) {
      const SmoothnessMatrix& li = dp.node(i).smoothness();
      const Mat inner = li.sqrt() * global.pinv() * li.sqrt();
      pp.ltilde_prime_max = std::max(
          pp.ltilde_prime_max,
          expected_smoothness(samplings[static_cast<std::size_t>(i)], 0.5 * (inner + inner.transpose())));
    }
    const double denom = rc.Ltilde_max + 2.0 * rc.Ltilde * pp.ltilde_prime_max;
    if (rc.Ltilde > 0.0 && denom > 0.0) {
      pp.theta = rc.n * rc.Ltilde / denom;
      pp.theta_prime = 2.0 * pp.theta * pp.ltilde_prime_max / rc.n;
    }
    rc.diana_pp = pp;
  }

  if (xstar) {
    if (xstar->size() != rc.d) throw DimMismatch("x* dimension differs from problem");
    double s = 0.0;
    for (int i = 0; i < rc.n; ++i) {
      const NodeProblem& node = dp.node(i);
      s += rc.Ltilde_i[static_cast<std::size_t>(i)] * node.smoothness().pinv_norm_sq(node.grad(*xstar));
    }
    rc.sigma_star = s / rc.n;
  }
  return rc;
}

Vec nsync_eso_params(const SmoothnessMatrix& l, const Sampling& s) {
  const double lam = lambda_max_of(hadamard(probability_matrices(s).Pbar, l.dense()));
  return lam * s.probabilities();
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kSkGD: return "skgd";
    case Method::kNSync: return "nsync";
    case Method::kCGDPlus: return "cgd+";
    case Method::kDCGD: return "dcgd";
    case Method::kDCGDPlus: return "dcgd+";
    case Method::kDIANA: return "diana";
    case Method::kDIANAPlus: return "diana+";
    case Method::kADIANA: return "adiana";
    case Method::kADIANAPlus: return "adiana+";
    case Method::kISEGAPlus: return "isega+";
    case Method::kDIANAPlusPlus: return "diana++";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Method m : {Method::kSkGD, Method::kNSync, Method::kCGDPlus, Method::kDCGD, Method::kDCGDPlus,
                   Method::kDIANA, Method::kDIANAPlus, Method::kADIANA, Method::kADIANAPlus,
                   Method::kISEGAPlus, Method::kDIANAPlusPlus}) {
    if (method_name(m) == lower) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

bool is_distributed(Method m) {
  return m != Method::kSkGD && m != Method::kNSync && m != Method::kCGDPlus;
}

bool is_baseline(Method m) {
  return m == Method::kDCGD || m == Method::kDIANA || m == Method::kADIANA;
}

MethodParams stepsize(Method method, const RateConstants& rc, double mu, double factor) {
  if (!(factor > 0.0)) throw ConfigError("step-size factor must be positive");
  require(rc.L, "L");
  const double n = rc.n;
  // Baselines see only scalar smoothness: L~_max becomes omega L_max.
  const double lt = is_baseline(method) ? rc.omega_max * rc.L_max : rc.Ltilde_max;
  MethodParams mp;
  switch (method) {
    case Method::kSkGD:
      require(rc.Lbar, "Lbar");
      mp.gamma = factor / rc.Lbar;
      break;
    case Method::kNSync:
      require(rc.Lbar, "Lbar");
      mp.gamma = 1.0 / rc.Lbar;
      break;
    case Method::kCGDPlus:
      require(rc.Lbar, "Lbar");
      mp.gamma = factor / (2.0 * rc.Lbar);
      break;
    case Method::kDCGD:
    case Method::kDCGDPlus:
      mp.gamma = factor / (rc.L + 2.0 * lt / n);
      break;
    case Method::kDIANA:
    case Method::kDIANAPlus:
      mp.gamma = factor / (rc.L + 6.0 * lt / n);
      mp.alpha = 1.0 / (1.0 + rc.omega_max);
      break;
    case Method::kADIANA:
    case Method::kADIANAPlus:
      if (!(mu > 0.0)) throw MissingConstant("accelerated parameters need mu > 0");
      mp = adiana_params({rc.L, lt, rc.omega_max, rc.n}, mu, factor);
      break;
    case Method::kISEGAPlus:
      mp.gamma = factor / (4.0 * lt / n + 2.0 * rc.L + mu * (rc.omega_max + 1.0));
      break;
    case Method::kDIANAPlusPlus: {
      if (!rc.diana_pp) throw MissingConstant("DIANA++ needs a master sampling");
      require(rc.Ltilde, "Ltilde");
      mp.alpha = 1.0 / (1.0 + rc.omega_max);
      const DianaPlusPlusConstants& pp = *rc.diana_pp;
      if (rc.Ltilde == 0.0) {
        // Uncompressed master: the DIANA+ parameters.
        mp.gamma = factor / (rc.L + 6.0 * lt / n);
        mp.beta = 1.0;
        mp.rho = mp.alpha;
        break;
      }
      mp.beta = 1.0 / (1.0 + rc.omega_master);
      if (pp.theta_prime > 0.0) mp.beta = std::min(mp.beta, mp.alpha / (2.0 * pp.theta_prime));
      const double lt2 = rc.Ltilde * pp.ltilde_prime_max;
      const double a = rc.L + 2.0 * rc.Ltilde + 4.0 * lt2 / n + 2.0 * lt / n;
      const double b = 4.0 * lt2 / n + 2.0 * lt / n;
      const double c = mp.alpha + mp.beta * pp.theta + mp.beta * pp.theta_prime;
      mp.rho = std::min(mp.alpha - mp.beta * pp.theta_prime, mp.beta);
      const double m = 2.0 * b / mp.rho;
      mp.gamma = factor / (a + c * m);
      break;
    }
  }
  return mp;
}

}  // namespace smoothsketch
