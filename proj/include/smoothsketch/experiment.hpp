#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smoothsketch/constants.hpp"
#include "smoothsketch/optimizers.hpp"
#include "smoothsketch/problem.hpp"

namespace smoothsketch {

enum class SamplingScheme {
  kUniform,
  kImportanceDCGD,
  kImportanceDIANA,
  kImportanceADIANA,
  kFull,
};

std::string scheme_name(SamplingScheme s);
SamplingScheme parse_scheme(const std::string& name);

// "diana+:importance-diana"; the scheme defaults to uniform.
struct MethodSpec {
  Method method = Method::kDIANAPlus;
  SamplingScheme scheme = SamplingScheme::kUniform;
  std::string label() const;
};

MethodSpec parse_method_spec(const std::string& text);

enum class StartKind { kZero, kNearOptimum };

struct ExperimentConfig {
  // LibSVM path, or "synthetic" for make_synthetic(synthetic).
  std::string dataset = "synthetic";
  SyntheticSpec synthetic;
  int n = 5;
  double mu = 1e-3;
  bool normalize = true;
  double l1 = 0.0;
  std::uint64_t partition_seed = 0;
  std::vector<MethodSpec> methods;
  std::vector<double> taus{1.0};
  // DIANA++ master sketch; tau <= 0 means the cell's tau.
  SamplingScheme master_scheme = SamplingScheme::kUniform;
  double master_tau = 0.0;
  int iters = 1000;
  std::vector<std::uint64_t> seeds{1};
  StartKind start = StartKind::kZero;
  double delta = 0.0;  // near-optimum distance; 0 means 1e-2 (1 + ||x*||)
  double target = 0.0;
  double step_factor = 1.0;
  double ref_tol = 1e-12;
  std::string xstar_file;  // cached x* written by solve-ref
  std::string output = "out";

  // Throws ConfigError on invariant violations (empty methods or seeds,
  // tau outside (0, d], n < 1).
  void validate(std::optional<int> dim = std::nullopt) const;
};

// Applies one key=value setting; throws ConfigError for unknown keys or
// unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Flat "key = value" text, '#' comments.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base = {});

// Relative dataset paths that do not exist are looked up under
// $SMOOTHSKETCH_DATA.
std::string resolve_dataset_path(const std::string& path);

DistributedProblem load_problem(const ExperimentConfig& cfg);

std::vector<Sampling> node_samplings(const DistributedProblem& dp, SamplingScheme scheme, double tau);
// Sampling on the global matrix (single-node methods, DIANA++ master).
Sampling global_sampling(const DistributedProblem& dp, SamplingScheme scheme, double tau);

// x* from the cache file when configured and present, else the reference
// solver.
Vec reference_point(const DistributedProblem& dp, const ExperimentConfig& cfg);

Vec start_point(const ExperimentConfig& cfg, const Vec& xstar);

std::string trace_csv(const RunTrace& trace);
// coords_up,residual,fgap.
std::string coords_csv(const RunTrace& trace);
void write_text_file(const std::string& path, const std::string& text);

struct CellOutcome {
  std::string name;  // file stem
  MethodSpec spec;
  double tau = 0.0;
  RateConstants constants;
  MethodParams params;
  std::string probability_digest;
  RunResult result;
};

// Runs every (method, tau) cell of the config; shared by run and tau-sweep.
std::vector<CellOutcome> run_cells(const ExperimentConfig& cfg, const DistributedProblem& dp,
                                   const Vec& xstar, std::ostream& log);

// Subcommands. Return the process exit code: 0 ok, 1 config error, 2 IO
// error, 3 numeric failure.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log, bool coords_files = false);
int cmd_tau_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_constants(const ExperimentConfig& cfg, std::ostream& out);
int cmd_solve_ref(const ExperimentConfig& cfg, std::ostream& out);

struct SketchAuditConfig {
  std::vector<int> dims{1000};
  std::vector<double> qs{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string output = "out";
};

// CSV text of the alpha/beta scatter with reference curves.
std::string sketch_audit_csv(const SketchAuditConfig& cfg);
int cmd_sketch_audit(const SketchAuditConfig& cfg, std::ostream& log);

// Maps a library exception to the exit codes above.
int exit_code_for(const std::exception& e);

}  // namespace smoothsketch
