#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "smoothsketch/errors.hpp"
#include "smoothsketch/experiment.hpp"

using namespace smoothsketch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smoothsketch_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg = parse_config(
      "dataset = synthetic\n"
      "n = 3\n"
      "mu = 1e-2\n"
      "synthetic.d = 6\n"
      "synthetic.m = 8\n"
      "methods = dcgd+, diana+:importance-diana, adiana+, diana++\n"
      "taus = 1, 3\n"
      "iters = 30\n"
      "seeds = 1-2\n");
  cfg.output = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config(
      "# comment\n"
      "dataset = a1a   # trailing\n"
      "n = 107\n"
      "mu = 1e-3\n"
      "methods = diana+:importance-diana, diana+, diana\n"
      "tau = 1\n"
      "seeds = 1-3, 7\n"
      "start = near-optimum\n"
      "master_scheme = full\n");
  CHECK(cfg.dataset == "a1a");
  CHECK(cfg.n == 107);
  CHECK(cfg.mu == 1e-3);
  REQUIRE(cfg.methods.size() == 3);
  CHECK(cfg.methods[0].method == Method::kDIANAPlus);
  CHECK(cfg.methods[0].scheme == SamplingScheme::kImportanceDIANA);
  CHECK(cfg.methods[1].scheme == SamplingScheme::kUniform);
  CHECK(cfg.methods[2].label() == "diana_uniform");
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(cfg.start == StartKind::kNearOptimum);
  CHECK(cfg.master_scheme == SamplingScheme::kFull);

  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("methods = sgd\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seeds = 5-2\n"), ConfigError);
}

TEST_CASE("validation") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);  // no methods
  cfg.methods.push_back(parse_method_spec("diana+"));
  CHECK_NOTHROW(cfg.validate());
  cfg.taus = {11.0};
  CHECK_THROWS_AS(cfg.validate(10), ConfigError);
  cfg.taus = {1.0};
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("empty method list writes nothing") {
  const fs::path out = scratch("empty");
  ExperimentConfig cfg;
  cfg.output = out.string();
  std::ostringstream log;
  CHECK(cmd_run(cfg, log) == 1);
  CHECK(!fs::exists(out));
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 1);
  CHECK(exit_code_for(TooFewPoints("x")) == 1);
  CHECK(exit_code_for(IoError("x")) == 2);
  CHECK(exit_code_for(ParseError(3, "x")) == 2);
  CHECK(exit_code_for(NoConvergence("x")) == 3);

  ExperimentConfig cfg;
  cfg.methods.push_back(parse_method_spec("diana+"));
  cfg.dataset = "/nonexistent/data.svm";
  std::ostringstream log;
  CHECK(cmd_run(cfg, log) == 2);
}

TEST_CASE("run writes traces, manifest and summary; reruns are byte-identical") {
  const fs::path a = scratch("run_a");
  const fs::path b = scratch("run_b");
  std::ostringstream log;
  REQUIRE(cmd_tau_sweep(small_config(a), log) == 0);
  REQUIRE(cmd_tau_sweep(small_config(b), log) == 0);

  int csv_files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path name = entry.path().filename();
    if (name.extension() == ".csv") {
      ++csv_files;
      CHECK(slurp(entry.path()) == slurp(b / name));
    }
  }
  // 4 methods x 2 taus x (2 seeds + mean + coords) + summary.
  CHECK(csv_files == 4 * 2 * 4 + 1);
  const std::string mean = slurp(a / "diana+_importance-diana_tau1_mean.csv");
  CHECK(mean.rfind("iter,coords_up,coords_down,bits_up,bits_down,residual,fgap\n", 0) == 0);
  const std::string manifest = slurp(a / "manifest.json");
  for (const char* key : {"\"gamma\"", "\"theta1\"", "\"probabilities_digest\"", "\"seeds\"", "\"Ltilde_max\""}) {
    CHECK(manifest.find(key) != std::string::npos);
  }
}

TEST_CASE("tau = d reproduces the uncompressed trace") {
  const fs::path out = scratch("full_tau");
  ExperimentConfig cfg = small_config(out);
  cfg.methods = {parse_method_spec("diana+"), parse_method_spec("diana+:full")};
  cfg.taus = {6};
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, log) == 0);
  CHECK(slurp(out / "diana+_uniform_tau6_mean.csv") == slurp(out / "diana+_full_tau6_mean.csv"));
}

TEST_CASE("coordinate traces are monotone") {
  const fs::path out = scratch("coords");
  ExperimentConfig cfg = small_config(out);
  cfg.methods = {parse_method_spec("diana+")};
  cfg.taus = {1, 1.5, 6};
  std::ostringstream log;
  REQUIRE(cmd_tau_sweep(cfg, log) == 0);
  for (const char* name : {"diana+_uniform_tau1_coords_mean.csv", "diana+_uniform_tau1.5_coords_mean.csv",
                           "diana+_uniform_tau6_coords_mean.csv"}) {
    std::istringstream in(slurp(out / name));
    std::string line;
    std::getline(in, line);
    CHECK(line == "coords_up,residual,fgap");
    long long prev = -1;
    while (std::getline(in, line)) {
      const long long c = std::stoll(line.substr(0, line.find(',')));
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("solve-ref caches x* and later runs reuse it") {
  const fs::path out = scratch("ref");
  ExperimentConfig cfg = small_config(out);
  cfg.xstar_file = (out / "xstar.txt").string();
  std::ostringstream log;
  REQUIRE(cmd_solve_ref(cfg, log) == 0);
  REQUIRE(fs::exists(cfg.xstar_file));
  const DistributedProblem dp = load_problem(cfg);
  const Vec cached = reference_point(dp, cfg);
  CHECK((cached - reference_solution(dp).x).norm() == 0.0);
}

TEST_CASE("near-optimum start") {
  ExperimentConfig cfg;
  cfg.start = StartKind::kNearOptimum;
  Vec xstar = Vec::Zero(4);
  xstar(0) = 3.0;
  const Vec x0 = start_point(cfg, xstar);
  CHECK((x0 - xstar).norm() == doctest::Approx(1e-2 * 4.0));
  cfg.delta = 0.5;
  CHECK((start_point(cfg, xstar) - xstar).norm() == doctest::Approx(0.5));
}

TEST_CASE("sketch audit CSV") {
  SketchAuditConfig cfg;
  cfg.dims = {1000, 8};
  cfg.qs = {0.1, 0.5, 1.0};
  cfg.trials = 50;
  const std::string csv = sketch_audit_csv(cfg);
  CHECK(csv.find("rotated-uniform,1000,1,0,1,") != std::string::npos);
  CHECK(csv.find("gaussian,8,0.5,") != std::string::npos);
  CHECK(csv.find("gaussian,1000") == std::string::npos);
  CHECK(csv.find("top-k") != std::string::npos);
  CHECK(csv == sketch_audit_csv(cfg));
}

TEST_CASE("command-line exit codes") {
  const char* cli = std::getenv("SMOOTHSKETCH_CLI");
  if (cli == nullptr) return;
  const fs::path out = scratch("cli");
  const std::string base = std::string(cli) + " ";
  auto code = [](const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(code(base + "run --output " + out.string()) == 1);
  CHECK(code(base + "run --methods diana+ --dataset /nonexistent.svm --output " + out.string()) == 2);
  CHECK(code(base + "run --methods nope") == 1);
  CHECK(code(base + "frobnicate") == 1);
  CHECK(code(base + "run --methods diana+ --iters 5 --set synthetic.d=4 --output " + out.string()) == 0);
  CHECK(fs::exists(out / "diana+_uniform_tau1_mean.csv"));
  CHECK(code(base + "constants --methods diana++ --set master_scheme=full") == 0);
}
