#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdest {

// Invalid or inconsistent experiment configuration; the CLI maps this to
// exit code 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parsed experiment description.  The file format is INI-style sections of
// key = value lines; '#' starts a comment; lists are comma-separated.
struct ExperimentConfig {
  // [model]
  std::string family = "gaussian";  // gaussian | laplace
  double scale = 1.0;
  // [space]
  int d = 1;
  double B = 1.0;
  // [prior]
  std::string prior = "raised_cosine";
  // [quantizer]
  std::string quantizer = "sign";  // sign | grid
  double grid_half_width = 0.0;    // 0 = auto: B + 3 * scale
  // [estimator]
  std::string estimator = "sign_inversion";
  // [loss]
  std::string loss = "lp";  // lp | wasserstein
  double p = 2.0;
  double orlicz_r = 2.0;
  // [sweep]
  std::vector<long> n_list = {100};
  std::vector<int> k_list = {1};
  // [run]
  long trials = 10000;
  std::uint64_t seed = 20250901;
  int theta_points = 9;
  int jobs = 0;  // 0 = QDEST_JOBS environment default, else hardware
  bool timing = false;
  // [fisher]
  std::vector<double> fisher_p_list = {2.0};
  int fisher_theta_points = 21;
  // [output]
  std::string out_path;  // empty = stdout
  std::string format = "csv";  // csv | records
};

// Reads and validates a configuration file; unknown keys are errors.  The
// QDEST_JOBS environment variable supplies the default job count, and an
// explicit jobs value in the file wins over it.
ExperimentConfig load_config(const std::string& path);

// Validation of an in-memory configuration (shared by load_config).
void validate_config(const ExperimentConfig& config);

}  // namespace qdest
