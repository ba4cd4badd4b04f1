#include "qdest/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdest/quadrature.hpp"
#include "qdest/special.hpp"

namespace qdest {

namespace {

void require_finite_nonneg(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
  }
}

void require_counts(long n, int k, int d) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
}

void require_denominator(double denom) {
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw NumericError("bound denominator is not positive and finite: " +
                       std::to_string(denom));
  }
}

}  // namespace

std::string bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::VanTreesLow: return "van_trees_low";
    case BoundKind::VanTreesHigh: return "van_trees_high";
    case BoundKind::FunctionalLow: return "functional_low";
    case BoundKind::FunctionalHigh: return "functional_high";
    case BoundKind::DistributedLow: return "distributed_low";
    case BoundKind::DistributedHigh: return "distributed_high";
    case BoundKind::OrliczLow: return "orlicz_low";
    case BoundKind::OrliczHigh: return "orlicz_high";
    case BoundKind::GaussianRate: return "gaussian_rate";
    case BoundKind::WassersteinLow: return "wasserstein_low";
    case BoundKind::WassersteinHigh: return "wasserstein_high";
    case BoundKind::GaussianWassersteinLow: return "gaussian_wasserstein_low";
    case BoundKind::GaussianWassersteinHigh: return "gaussian_wasserstein_high";
  }
  return "unknown";
}

double constant_a(double p, double B) {
  if (!(p > 1.5)) {
    throw std::domain_error(
        "constant_a: the raised-cosine score moment exists only for p > 3/2");
  }
  if (!(B > 0.0)) throw std::domain_error("constant_a: B must be > 0");
  if (std::isinf(B)) return 0.0;
  const double u = (2.0 * p - 1.0) / (2.0 * p - 2.0);
  const double v = (2.0 * p - 3.0) / (2.0 * p - 2.0);
  return std::pow(M_PI / 2.0, 1.0 / p) * (2.0 / B) *
         std::pow(beta_fn(u, v), (p - 1.0) / p);
}

double constant_b(double p, int d) {
  if (!(p > 1.0)) throw std::domain_error("constant_b: requires p > 1");
  if (d < 1) throw std::invalid_argument("constant_b: d must be >= 1");
  return (2.0 / (p - 1.0)) * std::pow(static_cast<double>(d),
                                      (2.0 - p) / (2.0 * p));
}

std::pair<double, double> constants_cd(double p, double sigma) {
  if (!(p > 1.0 && p <= 2.0)) {
    throw std::domain_error("constants_cd: requires 1 < p <= 2");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("constants_cd: sigma must be finite and > 0");
  }
  const double c = (p - 1.0) * std::pow(std::sqrt(2.0) / sigma, 1.0 / p) *
                   std::pow(gamma_fn(1.0 / (2.0 * p - 2.0)) /
                                ((p - 1.0) * std::sqrt(2.0 * M_PI) * sigma),
                            (p - 1.0) / p);
  const double dconst = 4.0 * std::sqrt(2.0) * (p - 1.0) / std::sqrt(3.0);
  return {c, dconst};
}

BoundValue van_trees_lp(int d, double omega_x_expectation, double omega_prior,
                        const LossOrder& order) {
  if (order.regime != Regime::Low) {
    throw std::domain_error("van_trees_lp: defined for 1 < p < 2");
  }
  if (d < 1) throw std::invalid_argument("van_trees_lp: d must be >= 1");
  require_finite_nonneg(omega_x_expectation, "omega_x_expectation");
  require_finite_nonneg(omega_prior, "omega_prior");
  const double p = order.p;
  const double dd = d;
  const double denom = std::pow(omega_x_expectation, (p - 1.0) / p) +
                       std::pow(dd, (p - 2.0) / p) * std::pow(omega_prior, 1.0 / p);
  require_denominator(denom);
  BoundValue out;
  out.kind = BoundKind::VanTreesLow;
  out.value = std::pow(dd, p) / std::pow(denom, p);
  out.inputs.d = d;
  out.inputs.p = p;
  out.inputs.info_term = omega_x_expectation;
  out.inputs.prior_term = omega_prior;
  return out;
}

BoundValue van_trees_l2_style(int d, double fisher_trace_expectation,
                              double prior_trace, const LossOrder& order) {
  if (order.regime != Regime::High) {
    throw std::domain_error("van_trees_l2_style: defined for p >= 2");
  }
  if (d < 1) throw std::invalid_argument("van_trees_l2_style: d must be >= 1");
  require_finite_nonneg(fisher_trace_expectation, "fisher_trace_expectation");
  require_finite_nonneg(prior_trace, "prior_trace");
  const double p = order.p;
  const double dd = d;
  const double denom = fisher_trace_expectation + prior_trace;
  require_denominator(denom);
  BoundValue out;
  out.kind = BoundKind::VanTreesHigh;
  out.value = std::pow(dd, 1.0 + p / 2.0) / std::pow(denom, p / 2.0);
  out.inputs.d = d;
  out.inputs.p = p;
  out.inputs.info_term = fisher_trace_expectation;
  out.inputs.prior_term = prior_trace;
  return out;
}

BoundValue functional_van_trees(
    std::span<const double> psi_derivative_expectations, double info_term,
    double prior_term, const LossOrder& order) {
  const int d = static_cast<int>(psi_derivative_expectations.size());
  if (d < 1) {
    throw std::invalid_argument("functional_van_trees: needs >= 1 coordinate");
  }
  const double p = order.p;
  const double dd = d;
  double deriv_sum = 0.0;
  for (double v : psi_derivative_expectations) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("functional_van_trees: non-finite derivative");
    }
    deriv_sum += v;
  }
  BoundValue out;
  if (order.regime == Regime::Low) {
    const double base = van_trees_lp(d, info_term, prior_term, order).value;
    // d^p / denom^p scaled to |sum of derivatives|^p / denom^p.
    out.value = base * std::pow(std::fabs(deriv_sum) / dd, p);
    out.kind = BoundKind::FunctionalLow;
  } else {
    const double base =
        van_trees_l2_style(d, info_term, prior_term, order).value;
    // d^(1+p/2) / denom^(p/2) scaled to d^(1-p/2) |sum|^p / denom^(p/2).
    out.value = base * std::pow(std::fabs(deriv_sum), p) / std::pow(dd, p);
    out.kind = BoundKind::FunctionalHigh;
  }
  out.inputs.d = d;
  out.inputs.p = p;
  out.inputs.info_term = info_term;
  out.inputs.prior_term = prior_term;
  return out;
}

BoundValue distributed_bound(std::span<const double> per_message_terms, int d,
                             double prior_term, const LossOrder& order) {
  const long n = static_cast<long>(per_message_terms.size());
  if (n < 1) {
    throw std::invalid_argument("distributed_bound: needs >= 1 message term");
  }
  if (d < 1) throw std::invalid_argument("distributed_bound: d must be >= 1");
  require_finite_nonneg(prior_term, "prior_term");
  for (double t : per_message_terms) require_finite_nonneg(t, "message term");
  const double p = order.p;
  const double dd = d;
  BoundValue out;
  out.inputs.n = n;
  out.inputs.d = d;
  out.inputs.p = p;
  out.inputs.prior_term = prior_term;
  if (order.regime == Regime::Low) {
    double sum = 0.0;
    for (double t : per_message_terms) {
      sum += std::pow(t, 2.0 * (p - 1.0) / p);
    }
    const double denom = std::pow(dd, (p - 2.0) / p) * std::pow(prior_term, 1.0 / p) +
                         (p - 1.0) * std::sqrt(sum);
    require_denominator(denom);
    out.kind = BoundKind::DistributedLow;
    out.value = std::pow(dd, p) / std::pow(denom, p);
    out.inputs.info_term = sum;
  } else {
    double sum = prior_term;
    for (double t : per_message_terms) sum += t;
    require_denominator(sum);
    out.kind = BoundKind::DistributedHigh;
    out.value = std::pow(dd, 1.0 + p / 2.0) / std::pow(sum, p / 2.0);
    out.inputs.info_term = sum - prior_term;
  }
  return out;
}

BoundValue orlicz_bound(long n, int k, int d, double B, double i0, double r,
                        const LossOrder& order) {
  require_counts(n, k, d);
  if (!(B > 0.0)) throw std::domain_error("orlicz_bound: B must be > 0");
  require_finite_nonneg(i0, "i0");
  const double p = order.p;
  const double dd = d;
  BoundValue out;
  out.inputs.n = n;
  out.inputs.k = k;
  out.inputs.d = d;
  out.inputs.B = B;
  out.inputs.p = p;
  out.inputs.r = r;
  out.inputs.i0 = i0;
  if (order.regime == Regime::Low) {
    if (!order.orlicz_low_valid) {
      throw std::domain_error("orlicz_bound: low regime requires 3/2 < p < 2");
    }
    if (!(r >= 1.0 / (p - 1.0))) {
      throw std::domain_error("orlicz_bound: low regime requires r >= 1/(p-1)");
    }
    const double data_term = std::sqrt(n * i0) * std::pow(k, 1.0 / r) *
                             std::pow(2.0, k * (2.0 - p) / p) *
                             constant_b(p, d);
    const double prior_term =
        std::pow(dd, (p - 1.0) / p) * constant_a(p, B);
    const double denom = data_term + prior_term;
    require_denominator(denom);
    out.kind = BoundKind::OrliczLow;
    out.value = std::pow(dd, p) / std::pow(denom, p);
  } else {
    if (!(r >= 1.0)) {
      throw std::domain_error("orlicz_bound: high regime requires r >= 1");
    }
    const double prior_term =
        std::isinf(B) ? 0.0 : dd * M_PI * M_PI / (B * B);
    const double denom =
        4.0 * i0 * i0 * std::pow(k, 2.0 / r) * static_cast<double>(n) +
        prior_term;
    require_denominator(denom);
    out.kind = BoundKind::OrliczHigh;
    out.value = std::pow(dd, 1.0 + p / 2.0) / std::pow(denom, p / 2.0);
  }
  return out;
}

BoundValue glm_bound(long n, int k, int d, double B, double sigma,
                     const LossOrder& order) {
  require_counts(n, k, d);
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw std::domain_error("glm_bound: B must be finite and > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("glm_bound: sigma must be finite and > 0");
  }
  if (order.regime != Regime::High) {
    throw std::domain_error("glm_bound: defined for p >= 2");
  }
  const double p = order.p;
  const double dd = d;
  const double s2 = sigma * sigma;
  const double branch_d = std::pow(s2 / (static_cast<double>(n) * dd), p / 2.0);
  const double branch_k =
      std::pow(3.0 * s2 / (32.0 * static_cast<double>(n) * k), p / 2.0);
  BoundValue out;
  out.kind = BoundKind::GaussianRate;
  out.value = std::pow(dd, 1.0 + p / 2.0) * std::max(branch_d, branch_k);
  out.condition_satisfied =
      M_PI * M_PI * s2 * dd <=
      static_cast<double>(n) * B * B * std::min<double>(k, d);
  out.inputs.n = n;
  out.inputs.k = k;
  out.inputs.d = d;
  out.inputs.B = B;
  out.inputs.p = p;
  out.inputs.scale = sigma;
  return out;
}

BoundValue wasserstein_bound(std::span<const double> per_message_terms, int d,
                             double prior_term,
                             double mean_derivative_expectation,
                             const LossOrder& order) {
  if (!std::isfinite(mean_derivative_expectation)) {
    throw std::invalid_argument(
        "wasserstein_bound: mean derivative must be finite");
  }
  BoundValue out = distributed_bound(per_message_terms, d, prior_term, order);
  out.kind = (order.regime == Regime::Low) ? BoundKind::WassersteinLow
                                           : BoundKind::WassersteinHigh;
  out.value *= std::pow(std::fabs(mean_derivative_expectation), order.p);
  out.inputs.mean_derivative = mean_derivative_expectation;
  return out;
}

BoundValue glm_wasserstein_bound(long n, int k, int d, double B, double sigma,
                                 const LossOrder& order) {
  require_counts(n, k, d);
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw std::domain_error("glm_wasserstein_bound: B must be finite and > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("glm_wasserstein_bound: sigma must be finite and > 0");
  }
  const double p = order.p;
  const double dd = d;
  const double s2 = sigma * sigma;
  const double nn = static_cast<double>(n);
  BoundValue out;
  out.inputs.n = n;
  out.inputs.k = k;
  out.inputs.d = d;
  out.inputs.B = B;
  out.inputs.p = p;
  out.inputs.scale = sigma;
  if (order.regime == Regime::High) {
    const double prior_trace = dd * M_PI * M_PI / (B * B);
    const double branch_d = std::pow(nn * dd / s2 + prior_trace, -p / 2.0);
    const double branch_k =
        std::pow(32.0 * nn * k / (3.0 * s2) + prior_trace, -p / 2.0);
    out.kind = BoundKind::GaussianWassersteinHigh;
    out.value = std::pow(dd, 1.0 + p / 2.0) * std::max(branch_d, branch_k);
  } else {
    const auto [cp, dp] = constants_cd(p, sigma);
    const double ap = constant_a(p, B);  // throws for p <= 3/2
    const double branch_d = std::pow(
        cp * std::pow(dd, (2.0 - p) / p) * std::sqrt(nn) + ap, -p);
    const double branch_k = std::pow(
        (dp / sigma) * std::pow(dd, (4.0 - 3.0 * p) / (2.0 * p)) *
                std::pow(2.0, k * (2.0 - p) / p) * std::sqrt(k) *
                std::sqrt(nn) +
            ap,
        -p);
    out.kind = BoundKind::GaussianWassersteinLow;
    out.value = dd * std::max(branch_d, branch_k);
  }
  return out;
}

}  // namespace qdest
