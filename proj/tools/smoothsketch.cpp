// Command-line front end for the experiment runner.
//
//   smoothsketch run --config fig1.cfg --set iters=500
//   smoothsketch tau-sweep --config sweep.cfg
//   smoothsketch sketch-audit --dims 1000 --output out/audit
//   smoothsketch constants --config fig1.cfg
//   smoothsketch solve-ref --config fig1.cfg --set xstar_file=xstar.txt

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothsketch/errors.hpp"
#include "smoothsketch/experiment.hpp"

namespace ss = smoothsketch;

namespace {

struct ConfigArgs {
  std::string config_file;
  std::vector<std::string> settings;
  // Shorthand flags, applied after --set.
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.config_file, "key = value config file");
  cmd->add_option("-s,--set", args.settings, "override a config key (key=value), repeatable");
  for (const char* key : {"dataset", "n", "mu", "methods", "taus", "iters", "seeds", "start", "output",
                          "target", "step_factor", "xstar_file"}) {
    cmd->add_option(std::string("--") + key, args.flags[key], std::string("config key '") + key + "'");
  }
}

ss::ExperimentConfig build_config(const ConfigArgs& args) {
  ss::ExperimentConfig cfg;
  if (!args.config_file.empty()) cfg = ss::read_config_file(args.config_file);
  for (const std::string& kv : args.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ss::ConfigError("--set expects key=value, got '" + kv + "'");
    ss::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : args.flags) {
    if (!value.empty()) ss::apply_setting(cfg, key, value);
  }
  return cfg;
}

template <typename F>
int with_config(const ConfigArgs& args, F&& body) {
  try {
    return body(build_config(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ss::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-smoothness-aware sparsified distributed optimization experiments"};
  app.require_subcommand(1);

  ConfigArgs run_args, sweep_args, const_args, ref_args;
  CLI::App* run = app.add_subcommand("run", "run every (method, tau) cell and write traces");
  add_config_options(run, run_args);
  CLI::App* sweep = app.add_subcommand("tau-sweep", "like run, plus coordinate-indexed traces");
  add_config_options(sweep, sweep_args);
  CLI::App* constants = app.add_subcommand("constants", "print rate constants and parameters as JSON");
  add_config_options(constants, const_args);
  CLI::App* solve_ref = app.add_subcommand("solve-ref", "compute x* and write it to xstar_file");
  add_config_options(solve_ref, ref_args);

  ss::SketchAuditConfig audit;
  CLI::App* audit_cmd = app.add_subcommand("sketch-audit", "alpha/beta scatter for linear sketches");
  audit_cmd->add_option("--dims", audit.dims, "dimensions")->delimiter(',');
  audit_cmd->add_option("--qs", audit.qs, "inclusion probabilities")->delimiter(',');
  audit_cmd->add_option("--trials", audit.trials, "Monte Carlo draws for sampled schemes");
  audit_cmd->add_option("--seed", audit.seed, "random seed");
  audit_cmd->add_option("--output", audit.output, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) {
    return with_config(run_args, [](const ss::ExperimentConfig& c) { return ss::cmd_run(c, std::cout); });
  }
  if (*sweep) {
    return with_config(sweep_args, [](const ss::ExperimentConfig& c) { return ss::cmd_tau_sweep(c, std::cout); });
  }
  if (*constants) {
    return with_config(const_args, [](const ss::ExperimentConfig& c) { return ss::cmd_constants(c, std::cout); });
  }
  if (*solve_ref) {
    return with_config(ref_args, [](const ss::ExperimentConfig& c) { return ss::cmd_solve_ref(c, std::cout); });
  }
  return ss::cmd_sketch_audit(audit, std::cout);
}
