#include "qdest/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace qdest {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  std::map<std::string, std::string> kv;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    kv[key] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  bool jobs_in_file = false;
  for (const auto& [key, value] : kv) {
    if (key == "model.family") cfg.family = value;
    else if (key == "model.scale") cfg.scale = parse_double(key, value);
    else if (key == "space.d") cfg.d = static_cast<int>(parse_long(key, value));
    else if (key == "space.B") cfg.B = parse_double(key, value);
    else if (key == "prior.kind") cfg.prior = value;
    else if (key == "quantizer.kind") cfg.quantizer = value;
    else if (key == "quantizer.half_width") {
      cfg.grid_half_width = (value == "auto") ? 0.0 : parse_double(key, value);
    }
    else if (key == "estimator.kind") cfg.estimator = value;
    else if (key == "loss.kind") cfg.loss = value;
    else if (key == "loss.p") cfg.p = parse_double(key, value);
    else if (key == "loss.orlicz_r") cfg.orlicz_r = parse_double(key, value);
    else if (key == "sweep.n") {
      cfg.n_list.clear();
      for (const auto& item : split_list(value)) {
        cfg.n_list.push_back(parse_long(key, item));
      }
    }
    else if (key == "sweep.k") {
      cfg.k_list.clear();
      for (const auto& item : split_list(value)) {
        cfg.k_list.push_back(static_cast<int>(parse_long(key, item)));
      }
    }
    else if (key == "run.trials") cfg.trials = parse_long(key, value);
    else if (key == "run.seed") cfg.seed = parse_u64(key, value);
    else if (key == "run.theta_points") {
      cfg.theta_points = static_cast<int>(parse_long(key, value));
    }
    else if (key == "run.jobs") {
      cfg.jobs = static_cast<int>(parse_long(key, value));
      jobs_in_file = true;
    }
    else if (key == "run.timing") cfg.timing = parse_bool(key, value);
    else if (key == "fisher.p") {
      cfg.fisher_p_list.clear();
      for (const auto& item : split_list(value)) {
        cfg.fisher_p_list.push_back(parse_double(key, item));
      }
    }
    else if (key == "fisher.theta_points") {
      cfg.fisher_theta_points = static_cast<int>(parse_long(key, value));
    }
    else if (key == "output.path") cfg.out_path = value;
    else if (key == "output.format") cfg.format = value;
    else throw ConfigError("unknown config key: " + key);
  }

  if (!jobs_in_file) {
    if (const char* env = std::getenv("QDEST_JOBS")) {
      cfg.jobs = static_cast<int>(parse_long("QDEST_JOBS", env));
    }
  }

  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.family != "gaussian" && cfg.family != "laplace") {
    throw ConfigError("model.family must be gaussian or laplace");
  }
  if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) {
    throw ConfigError("model.scale must be finite and > 0");
  }
  if (cfg.d < 1) throw ConfigError("space.d must be >= 1");
  if (!(cfg.B > 0.0) || !std::isfinite(cfg.B)) {
    throw ConfigError("space.B must be finite and > 0");
  }
  if (cfg.prior != "raised_cosine") {
    throw ConfigError("prior.kind must be raised_cosine");
  }
  if (cfg.quantizer != "sign" && cfg.quantizer != "grid") {
    throw ConfigError("quantizer.kind must be sign or grid");
  }
  if (cfg.grid_half_width < 0.0 || !std::isfinite(cfg.grid_half_width)) {
    throw ConfigError("quantizer.half_width must be 'auto' or > 0");
  }
  if (cfg.estimator != "sign_inversion" && cfg.estimator != "quantized_ml" &&
      cfg.estimator != "sample_mean") {
    throw ConfigError(
        "estimator.kind must be sign_inversion, quantized_ml, or sample_mean");
  }
  if (cfg.estimator == "sign_inversion" && cfg.quantizer != "sign") {
    throw ConfigError("sign_inversion requires quantizer.kind = sign");
  }
  if (cfg.estimator == "quantized_ml" && cfg.quantizer == "sign") {
    for (int k : cfg.k_list) {
      if (k != 1) {
        throw ConfigError(
            "quantized_ml with a sign quantizer requires k = 1 "
            "(sensors must observe a single coordinate)");
      }
    }
  }
  if (cfg.loss != "lp" && cfg.loss != "wasserstein") {
    throw ConfigError("loss.kind must be lp or wasserstein");
  }
  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p)) {
    throw ConfigError("loss.p must be finite and > 1");
  }
  if (!(cfg.orlicz_r >= 1.0) || !std::isfinite(cfg.orlicz_r)) {
    throw ConfigError("loss.orlicz_r must be finite and >= 1");
  }
  if (cfg.n_list.empty()) throw ConfigError("sweep.n must be nonempty");
  for (long n : cfg.n_list) {
    if (n < 1) throw ConfigError("sweep.n entries must be >= 1");
  }
  if (cfg.k_list.empty()) throw ConfigError("sweep.k must be nonempty");
  for (int k : cfg.k_list) {
    if (k < 1 || k > 16) throw ConfigError("sweep.k entries must lie in [1, 16]");
    if (cfg.quantizer == "grid" && k < 2) {
      throw ConfigError("grid quantizer requires k >= 2");
    }
  }
  if (cfg.trials < 1) throw ConfigError("run.trials must be >= 1");
  if (cfg.theta_points < 1) throw ConfigError("run.theta_points must be >= 1");
  if (cfg.jobs < 0) throw ConfigError("run.jobs must be >= 0");
  if (cfg.fisher_p_list.empty()) throw ConfigError("fisher.p must be nonempty");
  for (double p : cfg.fisher_p_list) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw ConfigError("fisher.p entries must be finite and > 1");
    }
  }
  if (cfg.fisher_theta_points < 1) {
    throw ConfigError("fisher.theta_points must be >= 1");
  }
  if (cfg.format != "csv" && cfg.format != "records") {
    throw ConfigError("output.format must be csv or records");
  }
}

}  // namespace qdest
