#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>

#include "qdest/models.hpp"

namespace qdest {

// Minimax lower bounds on the worst-case estimation risk.  Low variants
// cover 1 < p < 2, high variants p >= 2.  Every evaluator is a pure
// function of precomputed information quantities.
enum class BoundKind {
  VanTreesLow,
  VanTreesHigh,
  FunctionalLow,
  FunctionalHigh,
  DistributedLow,
  DistributedHigh,
  OrliczLow,
  OrliczHigh,
  GaussianRate,
  WassersteinLow,
  WassersteinHigh,
  GaussianWassersteinLow,
  GaussianWassersteinHigh,
};

std::string bound_kind_name(BoundKind kind);

// Echo of the inputs a bound was evaluated from; fields that do not apply
// stay NaN / -1.
struct BoundInputs {
  long n = -1;
  int k = -1;
  int d = -1;
  double B = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();
  double scale = std::numeric_limits<double>::quiet_NaN();
  double i0 = std::numeric_limits<double>::quiet_NaN();
  double info_term = std::numeric_limits<double>::quiet_NaN();
  double prior_term = std::numeric_limits<double>::quiet_NaN();
  double mean_derivative = std::numeric_limits<double>::quiet_NaN();
};

struct BoundValue {
  double value = 0.0;
  BoundKind kind;
  bool condition_satisfied = true;
  BoundInputs inputs;
};

// Per-coordinate prior information constant A_p for the raised-cosine prior
// on [-B, B]; requires p > 3/2.
double constant_a(double p, double B);

// Dimension factor B_{p,d} = (2 / (p - 1)) d^((2-p)/(2p)); requires p > 1.
double constant_b(double p, int d);

// Gaussian constants (C_p, D_p) for the low-regime rate; requires
// 1 < p <= 2 (the endpoint gives the classical limits C_2 = 1/sigma and
// D_2 = 4 sqrt(2) / sqrt(3)).
std::pair<double, double> constants_cd(double p, double sigma);

// Bayesian information bound for estimating from the raw sample, low
// regime: d^p / (omega_x^((p-1)/p) + d^((p-2)/p) omega_prior^(1/p))^p,
// where omega_x = E_prior[(trace of order-p information)^(1/(p-1))].
BoundValue van_trees_lp(int d, double omega_x_expectation, double omega_prior,
                        const LossOrder& order);

// High-regime counterpart: d^(1+p/2) / (E_prior[tr I_X] + tr I(prior))^(p/2).
BoundValue van_trees_l2_style(int d, double fisher_trace_expectation,
                              double prior_trace, const LossOrder& order);

// Bound for a smooth functional with coordinatewise derivative
// expectations; with the identity functional it recovers the two bounds
// above.  The denominator terms carry the same meaning per regime.
BoundValue functional_van_trees(std::span<const double> psi_derivative_expectations,
                                double info_term, double prior_term,
                                const LossOrder& order);

// n-sensor bound from per-message information terms.  Low regime expects
// t_j = E_prior[(trace of order-p message information)^(1/(p-1))] and the
// prior omega trace; high regime expects E_prior[tr I_Mj] and tr I(prior).
BoundValue distributed_bound(std::span<const double> per_message_terms, int d,
                             double prior_term, const LossOrder& order);

// Bound in terms of the score-projection Orlicz certificate I_0 alone.
// Low regime requires 3/2 < p < 2 and r >= 1/(p-1); high regime p >= 2 and
// r >= 1.  B may be +infinity, which drops the prior term.
BoundValue orlicz_bound(long n, int k, int d, double B, double i0, double r,
                        const LossOrder& order);

// Explicit Gaussian location rate, p >= 2:
// d^(1+p/2) max{(sigma^2/(n d))^(p/2), (3 sigma^2/(32 n k))^(p/2)}.
// condition_satisfied records pi^2 sigma^2 d <= n B^2 min(k, d).
BoundValue glm_bound(long n, int k, int d, double B, double sigma,
                     const LossOrder& order);

// Wasserstein-p risk bound: the distributed bound scaled by
// |E_prior[d/dtheta_i E[X_i]]|^p (required identical across coordinates).
BoundValue wasserstein_bound(std::span<const double> per_message_terms, int d,
                             double prior_term, double mean_derivative_expectation,
                             const LossOrder& order);

// Explicit Gaussian location Wasserstein-p rate, both regimes.
BoundValue glm_wasserstein_bound(long n, int k, int d, double B, double sigma,
                                 const LossOrder& order);

}  // namespace qdest
