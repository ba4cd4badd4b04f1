#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qdest/config.hpp"
#include "qdest/sweep.hpp"

namespace {

// Exit codes: 0 success, 2 dominance-check failure, 3 configuration error,
// 1 anything else.
constexpr int kExitDominance = 2;
constexpr int kExitConfig = 3;

int jobs_from_environment() {
  const char* env = std::getenv("QDEST_JOBS");
  if (env == nullptr) return 0;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    throw qdest::ConfigError(std::string("QDEST_JOBS must be an integer, got '") +
                             env + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Minimax lower bounds and Monte Carlo worst-case risk for "
      "distributed estimation from quantized samples"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format;
  int jobs = 0;
  bool timing = false;

  auto* config_opt =
      app.add_option("--config", config_path, "experiment configuration file")
          ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
  auto* out_opt =
      app.add_option("--out", out_path, "output file (default: stdout)");
  auto* format_opt = app.add_option("--format", format, "output format")
                         ->check(CLI::IsMember({"csv", "records"}));
  auto* jobs_opt =
      app.add_option("--jobs", jobs, "worker threads (0 = hardware default)");
  auto* timing_opt = app.add_flag(
      "--timing", timing,
      "record wall-clock times (off by default so reruns are byte-identical)");
  (void)config_opt;
  (void)timing_opt;

  auto* bound_cmd = app.add_subcommand(
      "bound", "evaluate the bound columns over the (n, k) sweep");
  auto* fisher_cmd = app.add_subcommand(
      "fisher", "tabulate information quantities over p and theta");
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "bounds plus Monte Carlo worst-case risk and the dominance check");
  bound_cmd->fallthrough();
  fisher_cmd->fallthrough();
  simulate_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    qdest::ExperimentConfig config;
    if (!config_path.empty()) {
      config = qdest::load_config(config_path);
    } else if (jobs_opt->count() == 0) {
      config.jobs = jobs_from_environment();
    }
    if (seed_opt->count() > 0) config.seed = seed;
    if (out_opt->count() > 0) config.out_path = out_path;
    if (format_opt->count() > 0) config.format = format;
    if (jobs_opt->count() > 0) config.jobs = jobs;
    if (timing) config.timing = true;
    qdest::validate_config(config);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!config.out_path.empty()) {
      file.open(config.out_path);
      if (!file) {
        throw qdest::ConfigError("cannot open output path: " + config.out_path);
      }
      out = &file;
    }

    if (*bound_cmd) {
      const qdest::SweepOutcome outcome = qdest::run_bound(config);
      qdest::write_results(*out, outcome.rows, config.format);
      return 0;
    }
    if (*fisher_cmd) {
      const std::vector<qdest::FisherRow> rows = qdest::run_fisher(config);
      qdest::write_fisher(*out, rows, config.format);
      return 0;
    }
    const qdest::SweepOutcome outcome = qdest::run_simulate(config);
    qdest::write_results(*out, outcome.rows, config.format);
    if (outcome.dominance_failure) {
      std::cerr << "dominance check failed: at least one row's worst-case "
                   "risk fell below an applicable lower bound\n";
      return kExitDominance;
    }
    return 0;
  } catch (const qdest::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
