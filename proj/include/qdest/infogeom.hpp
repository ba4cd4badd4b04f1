#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdest/models.hpp"
#include "qdest/quantize.hpp"

namespace qdest {

// Per-coordinate generalized Fisher information of order p,
//   (E |d/dtheta_i log f|^q)^(p-1)  with q conjugate to p,
// together with its trace.  At p = 2 this reduces to the classical Fisher
// information of a product family.
struct GeneralizedFisherResult {
  std::vector<double> per_coordinate;
  double trace = 0.0;
  LossOrder order;
  std::string source;  // "raw", "message", or "prior"
};

GeneralizedFisherResult generalized_fisher_x(const ParametricModel& model,
                                             std::span<const double> theta,
                                             const LossOrder& order);

GeneralizedFisherResult generalized_fisher_message(const Quantizer& quantizer,
                                                   const ParametricModel& model,
                                                   long sensor_index,
                                                   std::span<const double> theta,
                                                   const LossOrder& order);

// Raised-cosine priors use the closed form ((pi/2) (2/B)^p Beta(...)^(p-1)
// per coordinate, valid for p > 3/2); other priors are integrated
// numerically.
GeneralizedFisherResult prior_omega(const Prior& prior, const LossOrder& order);

// Expectations under the prior, as consumed by the bound evaluators.
// Location families have theta-free information, which is exploited; other
// models are integrated coordinate by coordinate (at most 3 integrated
// coordinates).
double expected_omega_x_root(const ParametricModel& model, const Prior& prior,
                             const LossOrder& order);
double expected_fisher_trace_x(const ParametricModel& model, const Prior& prior);
double expected_omega_message_root(const Quantizer& quantizer,
                                   const ParametricModel& model,
                                   const Prior& prior, long sensor_index,
                                   const LossOrder& order);
double expected_fisher_trace_message(const Quantizer& quantizer,
                                     const ParametricModel& model,
                                     const Prior& prior, long sensor_index);
double expected_mean_derivative(const ParametricModel& model,
                                const Prior& prior, int coord);

// Smallest K with E[exp((|Z|/K)^r)] <= 2, found by bisection on
// [1e-8, 1e6]; returns +infinity when no K in that bracket certifies, and
// 0 for laws concentrated at the origin.  Requires r >= 1.
double orlicz_norm(const ScalarLaw& law, double r);

struct OrliczCertificate {
  double r = 0.0;
  double value = 0.0;     // I_0: the largest norm found on the grid
  int theta_grid_points = 0;  // per coordinate
  int direction_count = 0;    // random directions; axes are always added
  std::vector<double> argmax_theta;
  std::vector<double> argmax_direction;
};

// Certifies sup over theta and unit directions u of the Orlicz norm of
// <u, score>.  For the shipped families the law is independent of theta, so
// the grid mostly deduplicates; it guards user-supplied families.
OrliczCertificate score_projection_bound(const ParametricModel& model, double r,
                                         int theta_grid_points = 21,
                                         int direction_count = 64,
                                         std::uint64_t seed = 0x0C11F1EDULL);

}  // namespace qdest
