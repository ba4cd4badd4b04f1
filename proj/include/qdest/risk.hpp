#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qdest/estimate.hpp"
#include "qdest/models.hpp"
#include "qdest/quantize.hpp"

namespace qdest {

enum class LossKind { Lp, Wasserstein };

enum class ExecPolicy { Serial, Parallel };

// ||a - b||_p^p.
double lp_loss(std::span<const double> a, std::span<const double> b,
               const LossOrder& order);

// W_p^p between the model laws at theta_hat and theta.  For location
// families the optimal coupling translates coordinatewise, giving
// ||theta_hat - theta||_p^p exactly; other models are rejected.
double wasserstein_pp_location(const ParametricModel& model,
                               std::span<const double> theta_hat,
                               std::span<const double> theta,
                               const LossOrder& order);

// Quantile-coupling evaluation of W_p^p between two scalar laws given by
// their CDFs: integral over [trim, 1 - trim] of |F_P^{-1} - F_Q^{-1}|^p,
// on a grid of about 1e5 nodes clustered dyadically toward both endpoints,
// with each inverse CDF found by bracketed bisection (~80 iterations).
double wasserstein_pp_quantile(const std::function<double(double)>& cdf_p,
                               const std::function<double(double)>& cdf_q,
                               const LossOrder& order, double trim = 1e-6);

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  bool std_error_valid = false;
  long trials = 0;  // trials that completed without an estimator failure
  std::vector<double> theta;
};

// Monte Carlo estimate of the risk at one parameter point.  Each trial
// draws its own stream seeded by (master_seed, stream_index, trial), so the
// result is bit-identical for any execution order, worker count, and
// policy; per-trial losses are reduced by ascending-index pairwise
// summation.  A failing trial is dropped; ten failures abort the run.
RiskEstimate monte_carlo_risk(const ParametricModel& model,
                              const Quantizer* quantizer,
                              const Estimator& estimator,
                              std::span<const double> theta,
                              const SimulationPlan& plan, LossKind loss,
                              const LossOrder& order,
                              std::uint64_t stream_index = 0,
                              ExecPolicy policy = ExecPolicy::Parallel,
                              int jobs = 0);

struct WorstCaseResult {
  RiskEstimate worst;  // the grid point with the largest mean risk
  std::vector<RiskEstimate> per_point;
};

// Maximum of monte_carlo_risk over plan.theta_grid; grid point g uses
// stream index g, so refining the grid leaves existing points unchanged.
WorstCaseResult worst_case_risk(const ParametricModel& model,
                                const Quantizer* quantizer,
                                const Estimator& estimator,
                                const SimulationPlan& plan, LossKind loss,
                                const LossOrder& order,
                                ExecPolicy policy = ExecPolicy::Parallel,
                                int jobs = 0);

// Tensor grid with `points_per_coordinate` equispaced values of [-B, B] per
// coordinate for d <= 3; beyond that, 200 seeded uniform points plus the
// center and the 2^d corners.
std::vector<std::vector<double>> make_theta_grid(const ParameterSpace& space,
                                                 int points_per_coordinate,
                                                 std::uint64_t seed = 0x9D1CEULL);

}  // namespace qdest
