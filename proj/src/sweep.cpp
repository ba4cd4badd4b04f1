#include "qdest/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "qdest/bounds.hpp"
#include "qdest/estimate.hpp"
#include "qdest/infogeom.hpp"
#include "qdest/risk.hpp"

namespace qdest {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void add_note(std::string& note, const std::string& text) {
  if (!note.empty()) note += "; ";
  note += text;
}

bool usable(double x) { return std::isfinite(x); }

std::unique_ptr<ParametricModel> make_model(const ExperimentConfig& config) {
  ParameterSpace space(config.d, config.B);
  if (config.family == "gaussian") {
    return std::make_unique<GaussianLocation>(config.scale, space);
  }
  if (config.family == "laplace") {
    return std::make_unique<LaplaceLocation>(config.scale, space);
  }
  throw ConfigError("unknown model family: " + config.family);
}

std::unique_ptr<Prior> make_prior(const ExperimentConfig& config) {
  if (config.prior == "raised_cosine") {
    return std::make_unique<RaisedCosinePrior>(ParameterSpace(config.d, config.B));
  }
  throw ConfigError("unknown prior: " + config.prior);
}

std::unique_ptr<Quantizer> make_quantizer(const ExperimentConfig& config,
                                          int k) {
  if (config.quantizer == "sign") {
    return std::make_unique<SignQuantizer>(k);
  }
  if (config.quantizer == "grid") {
    const double half_width = config.grid_half_width > 0.0
                                  ? config.grid_half_width
                                  : config.B + 3.0 * config.scale;
    return std::make_unique<GridQuantizer>(k, half_width);
  }
  throw ConfigError("unknown quantizer: " + config.quantizer);
}

std::unique_ptr<Estimator> make_estimator(const ExperimentConfig& config) {
  if (config.estimator == "sign_inversion") {
    return std::make_unique<SignInversionEstimator>();
  }
  if (config.estimator == "quantized_ml") {
    return std::make_unique<QuantizedMlEstimator>();
  }
  if (config.estimator == "sample_mean") {
    return std::make_unique<SampleMeanEstimator>();
  }
  throw ConfigError("unknown estimator: " + config.estimator);
}

// Prior expectations shared by every row of a sweep.  Only the terms of the
// loss regime in force are computed; a diverging or failing term is noted
// once here and the dependent bounds are then skipped silently.
struct InfoTerms {
  double omega_x_root = kNaN;      // low: E_prior[(tr Omega_X)^(1/(p-1))]
  double omega_prior_trace = kNaN; // low: tr of the order-p prior information
  double fisher_trace_x = kNaN;    // high: E_prior[tr I_X]
  double prior_trace = kNaN;       // high: tr I(prior)
  double mean_derivative = kNaN;
  std::string note;
};

InfoTerms compute_info_terms(const ParametricModel& model, const Prior& prior,
                             const LossOrder& order) {
  InfoTerms terms;
  if (order.regime == Regime::Low) {
    try {
      terms.omega_x_root = expected_omega_x_root(model, prior, order);
    } catch (const std::exception& e) {
      add_note(terms.note, std::string("omega_x: ") + e.what());
    }
    try {
      terms.omega_prior_trace = prior_omega(prior, order).trace;
    } catch (const std::exception& e) {
      add_note(terms.note, std::string("prior_omega: ") + e.what());
    }
  } else {
    try {
      terms.fisher_trace_x = expected_fisher_trace_x(model, prior);
    } catch (const std::exception& e) {
      add_note(terms.note, std::string("fisher_x: ") + e.what());
    }
    try {
      terms.prior_trace = prior_omega(prior, LossOrder::of(2.0)).trace;
    } catch (const std::exception& e) {
      add_note(terms.note, std::string("prior_fisher: ") + e.what());
    }
  }
  try {
    terms.mean_derivative = expected_mean_derivative(model, prior, 0);
  } catch (const std::exception& e) {
    add_note(terms.note, std::string("mean_derivative: ") + e.what());
  }
  return terms;
}

// The per-message expectation depends on the sensor only through its
// coordinate assignment, so terms are cached by assignment tuple; the
// shipped quantizers produce at most d distinct tuples.
class MessageTermCache {
 public:
  std::vector<double> terms(const Quantizer& quantizer,
                            const ParametricModel& model, const Prior& prior,
                            long n, const LossOrder& order) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const bool low = order.regime == Regime::Low;
    auto& cache = low ? low_ : high_;
    for (long j = 1; j <= n; ++j) {
      auto key = quantizer.assigned_coordinates(j, model.dimension());
      auto it = cache.find(key);
      if (it == cache.end()) {
        const double value =
            low ? expected_omega_message_root(quantizer, model, prior, j, order)
                : expected_fisher_trace_message(quantizer, model, prior, j);
        it = cache.emplace(std::move(key), value).first;
      }
      out[static_cast<std::size_t>(j - 1)] = it->second;
    }
    return out;
  }

 private:
  std::map<std::vector<int>, double> low_;
  std::map<std::vector<int>, double> high_;
};

// The score-projection certificate does not depend on (n, k), so it is
// computed at most once per sweep.
class LazyCertificate {
 public:
  explicit LazyCertificate(double r) : r_(r) {}

  // NaN when the computation failed; the reason lands in `error`.
  double value(const ParametricModel& model) {
    if (!computed_) {
      computed_ = true;
      try {
        value_ = score_projection_bound(model, r_).value;
      } catch (const std::exception& e) {
        error_ = e.what();
        value_ = kNaN;
      }
    }
    return value_;
  }
  const std::string& error() const { return error_; }

 private:
  double r_ = 0.0;
  bool computed_ = false;
  double value_ = kNaN;
  std::string error_;
};

ResultRow base_row(const ExperimentConfig& config, long n, int k) {
  ResultRow row;
  row.n = n;
  row.k = k;
  row.d = config.d;
  row.p = config.p;
  row.B = config.B;
  row.family = config.family;
  row.scale = config.scale;
  row.loss = config.loss;
  return row;
}

// Evaluates every bound column applicable to the row's family and regime.
// Structurally inapplicable columns (wrong regime, non-Gaussian family for
// the explicit rates) stay blank; an attempted evaluation that fails adds
// a note.
void fill_bounds(ResultRow& row, const ExperimentConfig& config,
                 const ParametricModel& model, const Prior& prior,
                 const Quantizer& quantizer, long n, int k,
                 const LossOrder& order, const InfoTerms& info,
                 MessageTermCache& cache, LazyCertificate& certificate) {
  const int d = config.d;
  const bool low = order.regime == Regime::Low;
  row.note = info.note;

  const double info_term = low ? info.omega_x_root : info.fisher_trace_x;
  const double prior_term = low ? info.omega_prior_trace : info.prior_trace;

  if (usable(info_term) && usable(prior_term)) {
    try {
      const BoundValue value =
          low ? van_trees_lp(d, info_term, prior_term, order)
              : van_trees_l2_style(d, info_term, prior_term, order);
      (low ? row.van_trees_low : row.van_trees_high) = value.value;
    } catch (const std::exception& e) {
      add_note(row.note, std::string("van_trees: ") + e.what());
    }
    if (usable(info.mean_derivative)) {
      try {
        const std::vector<double> psi(static_cast<std::size_t>(d),
                                      info.mean_derivative);
        const BoundValue value =
            functional_van_trees(psi, info_term, prior_term, order);
        (low ? row.functional_low : row.functional_high) = value.value;
      } catch (const std::exception& e) {
        add_note(row.note, std::string("functional: ") + e.what());
      }
    }
  }

  std::vector<double> message_terms;
  try {
    message_terms = cache.terms(quantizer, model, prior, n, order);
  } catch (const std::exception& e) {
    add_note(row.note, std::string("message_terms: ") + e.what());
  }

  if (!message_terms.empty() && usable(prior_term)) {
    try {
      const BoundValue value =
          distributed_bound(message_terms, d, prior_term, order);
      (low ? row.distributed_low : row.distributed_high) = value.value;
    } catch (const std::exception& e) {
      add_note(row.note, std::string("distributed: ") + e.what());
    }
    if (usable(info.mean_derivative)) {
      try {
        const BoundValue value = wasserstein_bound(
            message_terms, d, prior_term, info.mean_derivative, order);
        (low ? row.wasserstein_low : row.wasserstein_high) = value.value;
      } catch (const std::exception& e) {
        add_note(row.note, std::string("wasserstein: ") + e.what());
      }
    }
  }

  const double i0 = certificate.value(model);
  if (!certificate.error().empty()) {
    add_note(row.note, "orlicz certificate: " + certificate.error());
  } else if (std::isinf(i0)) {
    add_note(row.note, "orlicz certificate unbounded");
  } else {
    try {
      const BoundValue value =
          orlicz_bound(n, k, d, config.B, i0, config.orlicz_r, order);
      (low ? row.orlicz_low : row.orlicz_high) = value.value;
    } catch (const std::exception& e) {
      add_note(row.note, std::string("orlicz: ") + e.what());
    }
  }

  if (model.family_name() == "gaussian") {
    try {
      const BoundValue value =
          glm_bound(n, k, d, config.B, model.scale(), order);
      row.gaussian_rate = value.value;
      row.gaussian_rate_condition = value.condition_satisfied ? 1 : 0;
    } catch (const std::exception& e) {
      add_note(row.note, std::string("gaussian_rate: ") + e.what());
    }
    try {
      const BoundValue value =
          glm_wasserstein_bound(n, k, d, config.B, model.scale(), order);
      (low ? row.gaussian_wasserstein_low : row.gaussian_wasserstein_high) =
          value.value;
    } catch (const std::exception& e) {
      add_note(row.note, std::string("gaussian_wasserstein: ") + e.what());
    }
  }
}

// Bounds a simulated risk must dominate: the distributed bound of the
// matching loss and regime, plus the explicit Gaussian rate when its
// sample-size condition holds.
std::vector<double> dominance_candidates(const ResultRow& row,
                                         const ExperimentConfig& config,
                                         const LossOrder& order) {
  const bool low = order.regime == Regime::Low;
  std::vector<double> candidates;
  if (config.loss == "lp") {
    const double distributed = low ? row.distributed_low : row.distributed_high;
    if (usable(distributed)) candidates.push_back(distributed);
    if (usable(row.gaussian_rate) && row.gaussian_rate_condition == 1) {
      candidates.push_back(row.gaussian_rate);
    }
  } else {
    const double wasserstein = low ? row.wasserstein_low : row.wasserstein_high;
    if (usable(wasserstein)) candidates.push_back(wasserstein);
    const double glm = low ? row.gaussian_wasserstein_low
                           : row.gaussian_wasserstein_high;
    if (usable(glm)) candidates.push_back(glm);
  }
  return candidates;
}

std::vector<long> sorted_unique(std::vector<long> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<int> sorted_unique(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<double> sorted_unique(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

SweepOutcome run_sweep(const ExperimentConfig& config, bool simulate) {
  validate_config(config);
  const auto model = make_model(config);
  const auto prior = make_prior(config);
  const LossOrder order = LossOrder::of(config.p);
  const InfoTerms info = compute_info_terms(*model, *prior, order);
  LazyCertificate certificate(config.orlicz_r);

  std::unique_ptr<Estimator> estimator;
  std::vector<std::vector<double>> theta_grid;
  LossKind loss_kind = LossKind::Lp;
  if (simulate) {
    estimator = make_estimator(config);
    theta_grid = make_theta_grid(model->space(), config.theta_points);
    loss_kind = config.loss == "lp" ? LossKind::Lp : LossKind::Wasserstein;
  }

  SweepOutcome outcome;
  for (long n : sorted_unique(config.n_list)) {
    for (int k : sorted_unique(config.k_list)) {
      ResultRow row = base_row(config, n, k);
      const auto quantizer = make_quantizer(config, k);
      MessageTermCache cache;
      fill_bounds(row, config, *model, *prior, *quantizer, n, k, order, info,
                  cache, certificate);

      if (simulate) {
        SimulationPlan plan;
        plan.n = n;
        plan.k = k;
        plan.trials = config.trials;
        plan.master_seed = derive_seed(config.seed, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(k));
        plan.theta_grid = theta_grid;
        const auto start = std::chrono::steady_clock::now();
        try {
          const WorstCaseResult result = worst_case_risk(
              *model, quantizer.get(), *estimator, plan, loss_kind, order,
              ExecPolicy::Parallel, config.jobs);
          row.risk_mean = result.worst.mean;
          row.risk_std_error = result.worst.std_error;
          row.argmax_theta = result.worst.theta;
          if (!result.worst.std_error_valid) {
            add_note(row.note, "std_error needs at least two trials");
          }
          const auto candidates = dominance_candidates(row, config, order);
          if (candidates.empty()) {
            add_note(row.note, "no applicable bound for the dominance check");
          } else {
            const double bound =
                *std::max_element(candidates.begin(), candidates.end());
            row.dominance_margin =
                row.risk_mean + 4.0 * row.risk_std_error - bound;
            if (row.dominance_margin < 0.0) {
              outcome.dominance_failure = true;
              add_note(row.note, "dominance violated");
            }
          }
        } catch (const std::exception& e) {
          add_note(row.note, std::string("simulation: ") + e.what());
        }
        if (config.timing) {
          row.wall_clock_ms =
              std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
        }
      }
      outcome.rows.push_back(std::move(row));
    }
  }
  return outcome;
}

std::string join_theta(const std::vector<double>& theta) {
  std::string out;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i > 0) out += ';';
    out += format_double(theta[i]);
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> result_cells(const ResultRow& row) {
  return {
      std::to_string(row.n),
      std::to_string(row.k),
      std::to_string(row.d),
      format_double(row.p),
      format_double(row.B),
      row.family,
      format_double(row.scale),
      row.loss,
      format_double(row.van_trees_low),
      format_double(row.van_trees_high),
      format_double(row.functional_low),
      format_double(row.functional_high),
      format_double(row.distributed_low),
      format_double(row.distributed_high),
      format_double(row.orlicz_low),
      format_double(row.orlicz_high),
      format_double(row.gaussian_rate),
      row.gaussian_rate_condition < 0
          ? std::string()
          : std::to_string(row.gaussian_rate_condition),
      format_double(row.wasserstein_low),
      format_double(row.wasserstein_high),
      format_double(row.gaussian_wasserstein_low),
      format_double(row.gaussian_wasserstein_high),
      format_double(row.risk_mean),
      format_double(row.risk_std_error),
      join_theta(row.argmax_theta),
      format_double(row.dominance_margin),
      format_double(row.wall_clock_ms),
      row.note,
  };
}

std::vector<std::string> fisher_cells(const FisherRow& row) {
  return {
      format_double(row.p),
      join_theta(row.theta),
      format_double(row.omega_x),
      format_double(row.omega_message),
      format_double(row.omega_prior),
      format_double(row.orlicz_r),
      format_double(row.orlicz_i0),
      row.note,
  };
}

nlohmann::ordered_json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

nlohmann::ordered_json to_json(const ResultRow& row) {
  nlohmann::ordered_json object;
  object["n"] = row.n;
  object["k"] = row.k;
  object["d"] = row.d;
  object["p"] = row.p;
  object["B"] = row.B;
  object["family"] = row.family;
  object["scale"] = row.scale;
  object["loss"] = row.loss;
  object["van_trees_low"] = json_number(row.van_trees_low);
  object["van_trees_high"] = json_number(row.van_trees_high);
  object["functional_low"] = json_number(row.functional_low);
  object["functional_high"] = json_number(row.functional_high);
  object["distributed_low"] = json_number(row.distributed_low);
  object["distributed_high"] = json_number(row.distributed_high);
  object["orlicz_low"] = json_number(row.orlicz_low);
  object["orlicz_high"] = json_number(row.orlicz_high);
  object["gaussian_rate"] = json_number(row.gaussian_rate);
  object["gaussian_rate_condition"] =
      row.gaussian_rate_condition < 0
          ? nlohmann::ordered_json(nullptr)
          : nlohmann::ordered_json(row.gaussian_rate_condition == 1);
  object["wasserstein_low"] = json_number(row.wasserstein_low);
  object["wasserstein_high"] = json_number(row.wasserstein_high);
  object["gaussian_wasserstein_low"] = json_number(row.gaussian_wasserstein_low);
  object["gaussian_wasserstein_high"] =
      json_number(row.gaussian_wasserstein_high);
  object["risk_mean"] = json_number(row.risk_mean);
  object["risk_std_error"] = json_number(row.risk_std_error);
  object["argmax_theta"] = row.argmax_theta.empty()
                               ? nlohmann::ordered_json(nullptr)
                               : nlohmann::ordered_json(row.argmax_theta);
  object["dominance_margin"] = json_number(row.dominance_margin);
  object["wall_clock_ms"] = row.wall_clock_ms;
  object["note"] = row.note;
  return object;
}

nlohmann::ordered_json to_json(const FisherRow& row) {
  nlohmann::ordered_json object;
  object["p"] = row.p;
  object["theta"] = row.theta;
  object["omega_x"] = json_number(row.omega_x);
  object["omega_message"] = json_number(row.omega_message);
  object["omega_prior"] = json_number(row.omega_prior);
  object["orlicz_r"] = json_number(row.orlicz_r);
  object["orlicz_i0"] = json_number(row.orlicz_i0);
  object["note"] = row.note;
  return object;
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(cells[i]);
  }
  out << '\n';
}

void require_format(const std::string& format) {
  if (format != "csv" && format != "records") {
    throw ConfigError("unknown output format: " + format);
  }
}

}  // namespace

SweepOutcome run_bound(const ExperimentConfig& config) {
  return run_sweep(config, false);
}

SweepOutcome run_simulate(const ExperimentConfig& config) {
  return run_sweep(config, true);
}

std::vector<FisherRow> run_fisher(const ExperimentConfig& config) {
  validate_config(config);
  const auto model = make_model(config);
  const auto prior = make_prior(config);
  const auto quantizer = make_quantizer(config, config.k_list.front());
  const auto theta_grid =
      make_theta_grid(model->space(), config.fisher_theta_points);

  LazyCertificate certificate(config.orlicz_r);
  const double i0 = certificate.value(*model);

  std::vector<FisherRow> rows;
  for (double p : sorted_unique(config.fisher_p_list)) {
    const LossOrder order = LossOrder::of(p);
    double omega_prior = kNaN;
    std::string prior_note;
    try {
      omega_prior = prior_omega(*prior, order).trace;
    } catch (const std::exception& e) {
      prior_note = std::string("prior_omega: ") + e.what();
    }
    for (const auto& theta : theta_grid) {
      FisherRow row;
      row.p = p;
      row.theta = theta;
      row.orlicz_r = config.orlicz_r;
      row.orlicz_i0 = i0;
      row.note = prior_note;
      if (!certificate.error().empty()) {
        add_note(row.note, "orlicz certificate: " + certificate.error());
      }
      try {
        row.omega_x = generalized_fisher_x(*model, theta, order).trace;
      } catch (const std::exception& e) {
        add_note(row.note, std::string("omega_x: ") + e.what());
      }
      try {
        row.omega_message =
            generalized_fisher_message(*quantizer, *model, 1, theta, order)
                .trace;
      } catch (const std::exception& e) {
        add_note(row.note, std::string("omega_message: ") + e.what());
      }
      row.omega_prior = omega_prior;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_double(double x) {
  if (std::isnan(x)) return {};
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "n", "k", "d", "p", "B", "family", "scale", "loss",
      "van_trees_low", "van_trees_high", "functional_low", "functional_high",
      "distributed_low", "distributed_high", "orlicz_low", "orlicz_high",
      "gaussian_rate", "gaussian_rate_condition",
      "wasserstein_low", "wasserstein_high",
      "gaussian_wasserstein_low", "gaussian_wasserstein_high",
      "risk_mean", "risk_std_error", "argmax_theta", "dominance_margin",
      "wall_clock_ms", "note"};
  return columns;
}

const std::vector<std::string>& fisher_columns() {
  static const std::vector<std::string> columns = {
      "p", "theta", "omega_x", "omega_message", "omega_prior",
      "orlicz_r", "orlicz_i0", "note"};
  return columns;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows,
                   const std::string& format) {
  require_format(format);
  if (format == "csv") {
    write_csv_line(out, result_columns());
    for (const auto& row : rows) write_csv_line(out, result_cells(row));
  } else {
    for (const auto& row : rows) out << to_json(row).dump() << '\n';
  }
}

void write_fisher(std::ostream& out, const std::vector<FisherRow>& rows,
                  const std::string& format) {
  require_format(format);
  if (format == "csv") {
    write_csv_line(out, fisher_columns());
    for (const auto& row : rows) write_csv_line(out, fisher_cells(row));
  } else {
    for (const auto& row : rows) out << to_json(row).dump() << '\n';
  }
}

}  // namespace qdest
