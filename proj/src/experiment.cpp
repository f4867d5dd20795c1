#include "smoothsketch/experiment.hpp"

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "smoothsketch/errors.hpp"
#include "smoothsketch/sketch_bounds.hpp"

namespace smoothsketch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

// "1,2,5" or "1-10" or a mix.
std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : split(v, ',')) {
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(static_cast<std::uint64_t>(to_int(key, part)));
      continue;
    }
    const long long lo = to_int(key, trim(part.substr(0, dash)));
    const long long hi = to_int(key, trim(part.substr(dash + 1)));
    if (lo < 0 || hi < lo) throw ConfigError("bad seed range '" + part + "'");
    for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  }
  return seeds;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

json constants_json(const RateConstants& rc) {
  json j;
  j["n"] = rc.n;
  j["d"] = rc.d;
  j["L"] = rc.L;
  j["L_max"] = rc.L_max;
  j["Ltilde_i"] = rc.Ltilde_i;
  j["Ltilde_max"] = rc.Ltilde_max;
  j["omega_i"] = rc.omega_i;
  j["omega_max"] = rc.omega_max;
  j["Lbar"] = rc.Lbar;
  j["Ltilde"] = rc.Ltilde;
  j["omega_master"] = rc.omega_master;
  j["nu"] = rc.nu;
  j["nu1"] = rc.nu1;
  j["nu2"] = rc.nu2;
  j["sigma_star"] = rc.sigma_star;
  if (rc.diana_pp) {
    j["diana_pp"] = {{"Ltilde_prime_max", rc.diana_pp->ltilde_prime_max},
                     {"theta", rc.diana_pp->theta},
                     {"theta_prime", rc.diana_pp->theta_prime}};
  }
  return j;
}

json params_json(const MethodParams& p) {
  return {{"gamma", p.gamma}, {"alpha", p.alpha}, {"eta", p.eta},   {"theta1", p.theta1},
          {"theta2", p.theta2}, {"q", p.q},       {"beta", p.beta}, {"rho", p.rho}};
}

// FNV-1a over the bit patterns of every probability.
std::string probability_digest(const std::vector<Sampling>& ss, const std::optional<Sampling>& master) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const Sampling& s) {
    for (Eigen::Index j = 0; j < s.probabilities().size(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(s.probabilities()(j));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const Sampling& s : ss) feed(s);
  if (master) feed(*master);
  return fmt::format("{:016x}", h);
}

Sampling sampling_for(const Vec& l_diag, SamplingScheme scheme, double tau, double mu, int n) {
  const int d = static_cast<int>(l_diag.size());
  if (scheme == SamplingScheme::kFull || tau >= d) return Sampling::full(d);
  switch (scheme) {
    case SamplingScheme::kUniform:
      return uniform_sampling(d, tau);
    case SamplingScheme::kImportanceDCGD:
      return Sampling::independent(solve_dcgd_probs(l_diag, tau).p);
    case SamplingScheme::kImportanceDIANA:
      return Sampling::independent(solve_diana_probs(l_diag, tau, mu, n).p);
    case SamplingScheme::kImportanceADIANA:
      return Sampling::independent(solve_adiana_probs(l_diag, tau, mu, n).p);
    case SamplingScheme::kFull:
      break;
  }
  return Sampling::full(d);
}

std::string cell_name(const MethodSpec& spec, double tau) {
  return fmt::format("{}_tau{:g}", spec.label(), tau);
}

Vec read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    vals.push_back(to_double("x*", line));
  }
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t k = 0; k < vals.size(); ++k) v(static_cast<Eigen::Index>(k)) = vals[k];
  return v;
}

}  // namespace

std::string scheme_name(SamplingScheme s) {
  switch (s) {
    case SamplingScheme::kUniform: return "uniform";
    case SamplingScheme::kImportanceDCGD: return "importance-dcgd";
    case SamplingScheme::kImportanceDIANA: return "importance-diana";
    case SamplingScheme::kImportanceADIANA: return "importance-adiana";
    case SamplingScheme::kFull: return "full";
  }
  return "?";
}

SamplingScheme parse_scheme(const std::string& name) {
  for (SamplingScheme s : {SamplingScheme::kUniform, SamplingScheme::kImportanceDCGD,
                           SamplingScheme::kImportanceDIANA, SamplingScheme::kImportanceADIANA,
                           SamplingScheme::kFull}) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown sampling scheme '" + name + "'");
}

std::string MethodSpec::label() const { return method_name(method) + "_" + scheme_name(scheme); }

MethodSpec parse_method_spec(const std::string& text) {
  MethodSpec spec;
  const auto colon = text.find(':');
  spec.method = parse_method(trim(text.substr(0, colon)));
  if (colon != std::string::npos) spec.scheme = parse_scheme(trim(text.substr(colon + 1)));
  return spec;
}

void ExperimentConfig::validate(std::optional<int> dim) const {
  if (methods.empty()) throw ConfigError("method list is empty");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (taus.empty()) throw ConfigError("tau list is empty");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (iters < 0) throw ConfigError("iters must be nonnegative");
  if (!(mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  for (const double t : taus) {
    if (!(t > 0.0) || (dim && t > *dim)) {
      throw ConfigError(fmt::format("tau {:g} outside (0, d]", t));
    }
  }
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (key == "dataset") {
    cfg.dataset = v;
  } else if (key == "n") {
    cfg.n = static_cast<int>(to_int(key, v));
  } else if (key == "mu") {
    cfg.mu = to_double(key, v);
  } else if (key == "normalize") {
    cfg.normalize = to_bool(key, v);
  } else if (key == "l1") {
    cfg.l1 = to_double(key, v);
  } else if (key == "partition_seed") {
    cfg.partition_seed = static_cast<std::uint64_t>(to_int(key, v));
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& m : split(v, ',')) cfg.methods.push_back(parse_method_spec(m));
  } else if (key == "taus" || key == "tau") {
    cfg.taus.clear();
    for (const std::string& t : split(v, ',')) cfg.taus.push_back(to_double(key, t));
  } else if (key == "master_scheme") {
    cfg.master_scheme = parse_scheme(v);
  } else if (key == "master_tau") {
    cfg.master_tau = to_double(key, v);
  } else if (key == "iters") {
    cfg.iters = static_cast<int>(to_int(key, v));
  } else if (key == "seeds") {
    cfg.seeds = parse_seed_list(key, v);
  } else if (key == "start") {
    if (v == "zero") {
      cfg.start = StartKind::kZero;
    } else if (v == "near-optimum") {
      cfg.start = StartKind::kNearOptimum;
    } else {
      throw ConfigError("start must be 'zero' or 'near-optimum'");
    }
  } else if (key == "delta") {
    cfg.delta = to_double(key, v);
  } else if (key == "target") {
    cfg.target = to_double(key, v);
  } else if (key == "step_factor") {
    cfg.step_factor = to_double(key, v);
  } else if (key == "ref_tol") {
    cfg.ref_tol = to_double(key, v);
  } else if (key == "xstar_file") {
    cfg.xstar_file = v;
  } else if (key == "output") {
    cfg.output = v;
  } else if (key == "synthetic.m") {
    cfg.synthetic.m = static_cast<int>(to_int(key, v));
  } else if (key == "synthetic.d") {
    cfg.synthetic.d = static_cast<int>(to_int(key, v));
  } else if (key == "synthetic.seed") {
    cfg.synthetic.seed = static_cast<std::uint64_t>(to_int(key, v));
  } else if (key == "synthetic.spread") {
    cfg.synthetic.spread = to_double(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string resolve_dataset_path(const std::string& path) {
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("SMOOTHSKETCH_DATA")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

DistributedProblem load_problem(const ExperimentConfig& cfg) {
  Regularizer r;
  if (cfg.l1 > 0.0) r = {RegularizerKind::kL1, cfg.l1};
  if (cfg.dataset == "synthetic") {
    SyntheticSpec spec = cfg.synthetic;
    spec.n = cfg.n;
    spec.mu = cfg.mu;
    spec.normalize = cfg.normalize;
    DistributedProblem dp = make_synthetic(spec);
    dp.set_regularizer(r);
    return dp;
  }
  const Dataset data = read_libsvm_file(resolve_dataset_path(cfg.dataset));
  DistributedProblem dp = partition(data, cfg.n, cfg.mu, cfg.partition_seed, cfg.normalize);
  dp.set_regularizer(r);
  return dp;
}

std::vector<Sampling> node_samplings(const DistributedProblem& dp, SamplingScheme scheme, double tau) {
  std::vector<Sampling> out;
  out.reserve(static_cast<std::size_t>(dp.n()));
  for (int i = 0; i < dp.n(); ++i) {
    out.push_back(sampling_for(dp.node(i).smoothness().dense().diagonal(), scheme, tau, dp.mu(), dp.n()));
  }
  return out;
}

Sampling global_sampling(const DistributedProblem& dp, SamplingScheme scheme, double tau) {
  return sampling_for(dp.smoothness().dense().diagonal(), scheme, tau, dp.mu(), 1);
}

Vec reference_point(const DistributedProblem& dp, const ExperimentConfig& cfg) {
  if (!cfg.xstar_file.empty() && fs::exists(cfg.xstar_file)) {
    Vec x = read_vector_file(cfg.xstar_file);
    if (x.size() != dp.dim()) throw ConfigError("cached x* has the wrong dimension");
    return x;
  }
  return reference_solution(dp, cfg.ref_tol).x;
}

Vec start_point(const ExperimentConfig& cfg, const Vec& xstar) {
  if (cfg.start == StartKind::kZero) return Vec::Zero(xstar.size());
  Stream rng = derive_stream(cfg.partition_seed, StreamRole::kInit);
  Vec u(xstar.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = rng.normal();
  u.normalize();
  const double delta = cfg.delta > 0.0 ? cfg.delta : 1e-2 * (1.0 + xstar.norm());
  return xstar + delta * u;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iter,coords_up,coords_down,bits_up,bits_down,residual,fgap\n";
  for (const TraceRow& r : trace.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.iter, r.coords_up, r.coords_down, r.bits_up,
                       r.bits_down, num(r.residual), num(r.fgap));
  }
  return out;
}

std::string coords_csv(const RunTrace& trace) {
  std::string out = "coords_up,residual,fgap\n";
  for (const TraceRow& r : trace.rows) {
    out += fmt::format("{},{},{}\n", r.coords_up, num(r.residual), num(r.fgap));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<CellOutcome> run_cells(const ExperimentConfig& cfg, const DistributedProblem& dp,
                                   const Vec& xstar, std::ostream& log) {
  cfg.validate(dp.dim());
  const double fstar = dp.value(xstar);
  const Vec x0 = start_point(cfg, xstar);
  std::vector<CellOutcome> cells;
  for (const double tau : cfg.taus) {
    for (const MethodSpec& spec : cfg.methods) {
      CellOutcome cell;
      cell.name = cell_name(spec, tau);
      cell.spec = spec;
      cell.tau = tau;
      RunSetup setup;
      setup.method = spec.method;
      setup.samplings = node_samplings(dp, spec.scheme, tau);
      if (!is_distributed(spec.method)) {
        setup.master = global_sampling(dp, spec.scheme, tau);
      } else if (spec.method == Method::kDIANAPlusPlus) {
        setup.master = global_sampling(dp, cfg.master_scheme, cfg.master_tau > 0.0 ? cfg.master_tau : tau);
      }
      cell.constants = compute_constants(dp, setup.samplings, setup.master, xstar);
      cell.params = stepsize(spec.method, cell.constants, dp.mu(), cfg.step_factor);
      setup.params = cell.params;
      setup.x0 = x0;
      setup.xstar = xstar;
      setup.fstar = fstar;
      setup.iters = cfg.iters;
      setup.target = cfg.target;
      cell.probability_digest = probability_digest(setup.samplings, setup.master);
      cell.result = run(dp, setup, cfg.seeds);
      const TraceRow& last = cell.result.mean.rows.back();
      log << fmt::format("{:<32} gamma={:.4g} iters={} residual={:.3e} coords_up={}{}\n", cell.name,
                         cell.params.gamma, last.iter, last.residual, last.coords_up,
                         cell.result.mean.diverged ? " DIVERGED" : "");
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log, bool coords_files) {
  try {
    cfg.validate();
    const DistributedProblem dp = load_problem(cfg);
    cfg.validate(dp.dim());
    const Vec xstar = reference_point(dp, cfg);
    const std::vector<CellOutcome> cells = run_cells(cfg, dp, xstar, log);

    const fs::path dir(cfg.output);
    json manifest;
    manifest["dataset"] = cfg.dataset;
    manifest["n"] = dp.n();
    manifest["d"] = dp.dim();
    manifest["mu"] = cfg.mu;
    manifest["l1"] = cfg.l1;
    manifest["normalize"] = cfg.normalize;
    manifest["partition_seed"] = cfg.partition_seed;
    if (cfg.dataset == "synthetic") {
      manifest["synthetic"] = {{"m", cfg.synthetic.m},
                               {"d", cfg.synthetic.d},
                               {"seed", cfg.synthetic.seed},
                               {"spread", cfg.synthetic.spread}};
    }
    manifest["iters"] = cfg.iters;
    manifest["seeds"] = cfg.seeds;
    manifest["start"] = cfg.start == StartKind::kZero ? "zero" : "near-optimum";
    manifest["start_distance"] = (start_point(cfg, xstar) - xstar).norm();
    manifest["target"] = cfg.target;
    manifest["step_factor"] = cfg.step_factor;
    manifest["reference"] = {{"tol", cfg.ref_tol}, {"fstar", dp.value(xstar)}, {"xstar_norm", xstar.norm()}};

    std::string summary = "name,method,scheme,tau,gamma,iterations,residual,fgap,coords_up,bits_up,diverged\n";
    for (const CellOutcome& c : cells) {
      for (const RunTrace& t : c.result.per_seed) {
        write_text_file((dir / fmt::format("{}_seed{}.csv", c.name, t.seed)).string(), trace_csv(t));
      }
      write_text_file((dir / (c.name + "_mean.csv")).string(), trace_csv(c.result.mean));
      if (coords_files) {
        write_text_file((dir / (c.name + "_coords_mean.csv")).string(), coords_csv(c.result.mean));
      }
      json cell;
      cell["method"] = method_name(c.spec.method);
      cell["scheme"] = scheme_name(c.spec.scheme);
      cell["tau"] = c.tau;
      cell["constants"] = constants_json(c.constants);
      cell["params"] = params_json(c.params);
      cell["probabilities_digest"] = c.probability_digest;
      manifest["cells"][c.name] = cell;

      const TraceRow& last = c.result.mean.rows.back();
      summary += fmt::format("{},{},{},{:g},{},{},{},{},{},{},{}\n", c.name, method_name(c.spec.method),
                             scheme_name(c.spec.scheme), c.tau, num(c.params.gamma), last.iter,
                             num(last.residual), num(last.fgap), last.coords_up, last.bits_up,
                             c.result.mean.diverged ? 1 : 0);
    }
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    write_text_file((dir / "summary.csv").string(), summary);
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_tau_sweep(const ExperimentConfig& cfg, std::ostream& log) { return cmd_run(cfg, log, true); }

int cmd_constants(const ExperimentConfig& cfg, std::ostream& out) {
  try {
    cfg.validate();
    const DistributedProblem dp = load_problem(cfg);
    cfg.validate(dp.dim());
    const Vec xstar = reference_point(dp, cfg);
    json all;
    for (const double tau : cfg.taus) {
      for (const MethodSpec& spec : cfg.methods) {
        const std::vector<Sampling> ss = node_samplings(dp, spec.scheme, tau);
        std::optional<Sampling> master;
        if (!is_distributed(spec.method)) master = global_sampling(dp, spec.scheme, tau);
        if (spec.method == Method::kDIANAPlusPlus) {
          master = global_sampling(dp, cfg.master_scheme, cfg.master_tau > 0.0 ? cfg.master_tau : tau);
        }
        const RateConstants rc = compute_constants(dp, ss, master, xstar);
        all[cell_name(spec, tau)] = {{"constants", constants_json(rc)},
                                     {"params", params_json(stepsize(spec.method, rc, dp.mu(), cfg.step_factor))}};
      }
    }
    out << all.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_solve_ref(const ExperimentConfig& cfg, std::ostream& out) {
  try {
    const DistributedProblem dp = load_problem(cfg);
    const ReferenceSolution sol = reference_solution(dp, cfg.ref_tol);
    const std::string path =
        cfg.xstar_file.empty() ? (fs::path(cfg.output) / "xstar.txt").string() : cfg.xstar_file;
    std::string text;
    for (Eigen::Index j = 0; j < sol.x.size(); ++j) text += num(sol.x(j)) + "\n";
    write_text_file(path, text);
    out << fmt::format("x* written to {} (f* = {}, {} iterations, residual {:.3e})\n", path,
                       num(sol.value), sol.iterations, sol.residual);
    return 0;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

std::string sketch_audit_csv(const SketchAuditConfig& cfg) {
  std::string out;
  out += "# alpha: worst-case relative squared error; beta: expected bits / (32 d)\n";
  out += "# reference curves: linear sketches alpha = 1 - beta; any compressor alpha = 4^(-32 beta)\n";
  out += "# greedy and top-k points are not included\n";
  out += "scheme,d,q,alpha,beta,beta_wire,rank_ratio,slack,entropy_bound\n";
  Stream rng = derive_stream(cfg.seed, StreamRole::kGeneric);
  for (const int d : cfg.dims) {
    if (d < 1) throw ConfigError("audit dimension must be positive");
    for (const double q : cfg.qs) {
      if (!(q > 0.0 && q <= 1.0)) throw ConfigError("audit q must lie in (0, 1]");
      const double alpha = 1.0 - q;
      const double beta = expected_sparsifier_bits(d, q) / (32.0 * d);
      const double beta_wire = expected_wire_bits(d, q) / (32.0 * d);
      out += fmt::format("rotated-uniform,{},{:g},{},{},{},{},{},{}\n", d, q, num(alpha), num(beta),
                         num(beta_wire), num(q), num(alpha + q - 1.0),
                         num(1.0 + binary_entropy(q) / 32.0));
      if (d <= 64) {
        // Gaussian sketch with round(q d) rows, B = I.
        const int rows = std::max(1, static_cast<int>(std::lround(q * d)));
        const auto sch = LinearSketchScheme::custom(Mat::Identity(d, d), [d, rows](Stream& r) {
          Mat s(rows, d);
          for (int a = 0; a < rows; ++a) {
            for (int b = 0; b < d; ++b) s(a, b) = r.normal();
          }
          return s;
        });
        const TradeoffAudit a = tradeoff_audit(sch, cfg.trials, rng, 1e-9);
        const double gbeta = static_cast<double>(rows) / d;
        out += fmt::format("gaussian,{},{:g},{},{},{},{},{},\n", d, q, num(a.alpha), num(gbeta),
                           num(2.0 * gbeta), num(a.expected_rank_ratio), num(a.slack));
      }
    }
  }
  for (int k = 0; k <= 20; ++k) {
    const double beta = k / 20.0;
    out += fmt::format("linear-bound,,,{},{},,,,\n", num(linear_bound_alpha(beta)), num(beta));
    out += fmt::format("general-bound,,,{},{},,,,\n", num(general_bound_alpha(beta)), num(beta));
  }
  return out;
}

int cmd_sketch_audit(const SketchAuditConfig& cfg, std::ostream& log) {
  try {
    const std::string path = (fs::path(cfg.output) / "sketch_audit.csv").string();
    write_text_file(path, sketch_audit_csv(cfg));
    log << "wrote " << path << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const TooFewPoints*>(&e) ||
      dynamic_cast<const InfeasibleTau*>(&e)) {
    return 1;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const EmptyFile*>(&e)) {
    return 2;
  }
  return 3;
}

}  // namespace smoothsketch
