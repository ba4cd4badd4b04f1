#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "qdest/config.hpp"

namespace qdest {

// One output row of the bound/simulate commands.  NaN-valued columns and
// empty vectors render as blank cells; the column set is fixed and part of
// the output contract.
struct ResultRow {
  long n = 0;
  int k = 0;
  int d = 0;
  double p = 0.0;
  double B = 0.0;
  std::string family;
  double scale = 0.0;
  std::string loss;
  double van_trees_low = std::numeric_limits<double>::quiet_NaN();
  double van_trees_high = std::numeric_limits<double>::quiet_NaN();
  double functional_low = std::numeric_limits<double>::quiet_NaN();
  double functional_high = std::numeric_limits<double>::quiet_NaN();
  double distributed_low = std::numeric_limits<double>::quiet_NaN();
  double distributed_high = std::numeric_limits<double>::quiet_NaN();
  double orlicz_low = std::numeric_limits<double>::quiet_NaN();
  double orlicz_high = std::numeric_limits<double>::quiet_NaN();
  double gaussian_rate = std::numeric_limits<double>::quiet_NaN();
  int gaussian_rate_condition = -1;  // -1 blank, else 0/1
  double wasserstein_low = std::numeric_limits<double>::quiet_NaN();
  double wasserstein_high = std::numeric_limits<double>::quiet_NaN();
  double gaussian_wasserstein_low = std::numeric_limits<double>::quiet_NaN();
  double gaussian_wasserstein_high = std::numeric_limits<double>::quiet_NaN();
  double risk_mean = std::numeric_limits<double>::quiet_NaN();
  double risk_std_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> argmax_theta;
  double dominance_margin = std::numeric_limits<double>::quiet_NaN();
  double wall_clock_ms = 0.0;
  std::string note;
};

// Information table row of the fisher command.
struct FisherRow {
  double p = 0.0;
  std::vector<double> theta;
  double omega_x = std::numeric_limits<double>::quiet_NaN();
  double omega_message = std::numeric_limits<double>::quiet_NaN();
  double omega_prior = std::numeric_limits<double>::quiet_NaN();
  double orlicz_r = std::numeric_limits<double>::quiet_NaN();
  double orlicz_i0 = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct SweepOutcome {
  std::vector<ResultRow> rows;
  bool dominance_failure = false;
};

// Bound columns only, over sorted unique (n, k) sweep values.
SweepOutcome run_bound(const ExperimentConfig& config);

// Bounds plus the Monte Carlo worst-case risk and the dominance margin
// risk_mean + 4 std_error - max(applicable bounds); a negative margin on
// any row marks the outcome as a dominance failure.
SweepOutcome run_simulate(const ExperimentConfig& config);

// Information quantities across the fisher p-list and theta grid.
std::vector<FisherRow> run_fisher(const ExperimentConfig& config);

// Shortest round-trip decimal rendering; NaN renders as an empty string.
std::string format_double(double x);

const std::vector<std::string>& result_columns();
const std::vector<std::string>& fisher_columns();

// format is "csv" (RFC 4180, header line first) or "records" (one JSON
// object per line).
void write_results(std::ostream& out, const std::vector<ResultRow>& rows,
                   const std::string& format);
void write_fisher(std::ostream& out, const std::vector<FisherRow>& rows,
                  const std::string& format);

}  // namespace qdest
