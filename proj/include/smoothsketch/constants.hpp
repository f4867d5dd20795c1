#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "smoothsketch/problem.hpp"
#include "smoothsketch/sampling.hpp"

namespace smoothsketch {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DianaPlusPlusConstants {
  double ltilde_prime_max = 0.0;  // max_i lambda_max(Ptilde_i o (L_i^{1/2} L^dagger L_i^{1/2}))
  double theta = 0.0;
  double theta_prime = 0.0;
};

struct RateConstants {
  int n = 0;
  int d = 0;
  double L = 0.0;      // lambda_max of (1/n) sum L_i
  double L_max = 0.0;  // max_i lambda_max(L_i)
  std::vector<double> Ltilde_i;
  double Ltilde_max = 0.0;
  std::vector<double> omega_i;
  double omega_max = 0.0;
  // Master or single-node sketch on the global L; NaN when not applicable.
  double Lbar = kNaN;
  double Ltilde = kNaN;
  double omega_master = kNaN;
  double nu = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double sigma_star = kNaN;  // needs x*
  std::optional<DianaPlusPlusConstants> diana_pp;
};

// samplings holds one sampling per node. The master sampling drives Lbar,
// Ltilde and the DIANA++ constants; without it and with n == 1, node 0's
// sampling is used for Lbar/Ltilde.
RateConstants compute_constants(const DistributedProblem& dp, const std::vector<Sampling>& samplings,
                                const std::optional<Sampling>& master = std::nullopt,
                                const std::optional<Vec>& xstar = std::nullopt);

// max_i sum_j L_{i;jj}^{1/s} / max_j L_{i;jj}^{1/s} over the node diagonals.
double nu_s(const std::vector<Vec>& diagonals, double s);

// v_j = lambda_max(Pbar o L) p_j.
Vec nsync_eso_params(const SmoothnessMatrix& l, const Sampling& s);

enum class Method {
  kSkGD,
  kNSync,
  kCGDPlus,
  kDCGD,
  kDCGDPlus,
  kDIANA,
  kDIANAPlus,
  kADIANA,
  kADIANAPlus,
  kISEGAPlus,
  kDIANAPlusPlus,
};

std::string method_name(Method m);
// Accepts the names printed by method_name, case-insensitive; throws ConfigError.
Method parse_method(const std::string& name);
bool is_distributed(Method m);
bool is_baseline(Method m);

struct MethodParams {
  double gamma = 0.0;
  double alpha = 0.0;
  // ADIANA family.
  double eta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double q = 0.0;
  double beta = 0.0;  // z-averaging weight (ADIANA) or master shift step (DIANA++)
  // DIANA++ diagnostics.
  double rho = 0.0;
};

// Theory parameters at the upper bound of each step-size condition. The
// factor multiplies gamma (eta for the ADIANA family, with gamma then
// derived from eta as usual). Throws MissingConstant.
MethodParams stepsize(Method method, const RateConstants& rc, double mu, double factor = 1.0);

}  // namespace smoothsketch
