#include "qdest/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qdest/quadrature.hpp"

namespace qdest {

namespace {

double invert_cdf(const std::function<double(double)>& cdf, double u) {
  // Expand a bracket around 0, then bisect for ~80 iterations.
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200 && cdf(lo) > u; ++i) lo *= 2.0;
  for (int i = 0; i < 200 && cdf(hi) < u; ++i) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int resolved_jobs(int jobs) {
#ifdef _OPENMP
  return jobs > 0 ? jobs : omp_get_max_threads();
#else
  (void)jobs;
  return 1;
#endif
}

}  // namespace

double lp_loss(std::span<const double> a, std::span<const double> b,
               const LossOrder& order) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("lp_loss: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::pow(std::fabs(a[i] - b[i]), order.p);
  }
  return acc;
}

double wasserstein_pp_location(const ParametricModel& model,
                               std::span<const double> theta_hat,
                               std::span<const double> theta,
                               const LossOrder& order) {
  if (!model.location_family()) {
    throw std::invalid_argument(
        "wasserstein_pp_location: model is not a location family");
  }
  return lp_loss(theta_hat, theta, order);
}

double wasserstein_pp_quantile(const std::function<double(double)>& cdf_p,
                               const std::function<double(double)>& cdf_q,
                               const LossOrder& order, double trim) {
  if (!(trim > 0.0 && trim < 0.25)) {
    throw std::invalid_argument("wasserstein_pp_quantile: bad trim");
  }
  // Dyadic bands [trim, 2 trim], ..., up to 1/4, mirrored about 1/2, with a
  // uniform central band; uniform composite trapezoid inside each band.
  std::vector<std::pair<double, double>> bands;
  for (double lo = trim; lo < 0.25; lo *= 2.0) {
    bands.emplace_back(lo, std::min(2.0 * lo, 0.25));
  }
  bands.emplace_back(0.25, 0.75);
  const std::size_t one_sided = bands.size() - 1;
  for (std::size_t i = 0; i < one_sided; ++i) {
    bands.emplace_back(1.0 - bands[i].second, 1.0 - bands[i].first);
  }
  const int nodes_per_band =
      static_cast<int>(100000 / (2 * one_sided + 1)) + 1;

  const auto integrand = [&](double u) {
    const double diff = invert_cdf(cdf_p, u) - invert_cdf(cdf_q, u);
    return std::pow(std::fabs(diff), order.p);
  };
  std::vector<double> band_values(bands.size());
  for (std::size_t bi = 0; bi < bands.size(); ++bi) {
    const auto [lo, hi] = bands[bi];
    const double h = (hi - lo) / nodes_per_band;
    double acc = 0.5 * (integrand(lo) + integrand(hi));
    for (int i = 1; i < nodes_per_band; ++i) acc += integrand(lo + i * h);
    band_values[bi] = acc * h;
  }
  return pairwise_sum(band_values);
}

RiskEstimate monte_carlo_risk(const ParametricModel& model,
                              const Quantizer* quantizer,
                              const Estimator& estimator,
                              std::span<const double> theta,
                              const SimulationPlan& plan, LossKind loss,
                              const LossOrder& order,
                              std::uint64_t stream_index, ExecPolicy policy,
                              int jobs) {
  model.space().require_inside(theta);
  if (plan.n < 1 || plan.trials < 1) {
    throw std::invalid_argument("monte_carlo_risk: n and trials must be >= 1");
  }
  if (estimator.needs_messages() && quantizer == nullptr) {
    throw std::invalid_argument("monte_carlo_risk: estimator needs a quantizer");
  }
  const long trials = plan.trials;
  const long n = plan.n;
  const int d = model.dimension();
  std::vector<double> losses(trials);

  const auto run_trial = [&](long t) {
    RandomStream rng(derive_seed(plan.master_seed, stream_index,
                                 static_cast<std::uint64_t>(t)));
    std::vector<double> samples;
    model.sample(theta, n, rng, samples);
    std::vector<int> messages;
    if (estimator.needs_messages()) {
      messages.resize(n);
      for (long j = 0; j < n; ++j) {
        messages[j] = quantizer->encode(
            j + 1, std::span<const double>(samples.data() + j * d, d), rng);
      }
    }
    TrialData trial{messages, samples, n, d};
    const std::vector<double> theta_hat =
        estimator.estimate(trial, quantizer, model);
    return (loss == LossKind::Lp)
               ? lp_loss(theta_hat, theta, order)
               : wasserstein_pp_location(model, theta_hat, theta, order);
  };

  const bool parallel = (policy == ExecPolicy::Parallel);
  const int nthreads = resolved_jobs(jobs);
  if (parallel && nthreads > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (long t = 0; t < trials; ++t) {
      try {
        losses[t] = run_trial(t);
      } catch (const std::exception&) {
        losses[t] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  } else {
    for (long t = 0; t < trials; ++t) {
      try {
        losses[t] = run_trial(t);
      } catch (const std::exception&) {
        losses[t] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  std::vector<double> valid;
  valid.reserve(trials);
  for (double v : losses) {
    if (!std::isnan(v)) valid.push_back(v);
  }
  const long failures = trials - static_cast<long>(valid.size());
  if (failures >= 10) {
    throw std::runtime_error("monte_carlo_risk: " + std::to_string(failures) +
                             " trials failed");
  }
  RiskEstimate out;
  out.theta.assign(theta.begin(), theta.end());
  out.trials = static_cast<long>(valid.size());
  if (valid.empty()) {
    throw std::runtime_error("monte_carlo_risk: no successful trials");
  }
  out.mean = pairwise_sum(valid) / static_cast<double>(valid.size());
  if (valid.size() >= 2) {
    std::vector<double> sq(valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i) {
      const double c = valid[i] - out.mean;
      sq[i] = c * c;
    }
    const double var =
        pairwise_sum(sq) / static_cast<double>(valid.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(valid.size()));
    out.std_error_valid = true;
  }
  return out;
}

WorstCaseResult worst_case_risk(const ParametricModel& model,
                                const Quantizer* quantizer,
                                const Estimator& estimator,
                                const SimulationPlan& plan, LossKind loss,
                                const LossOrder& order, ExecPolicy policy,
                                int jobs) {
  plan.validate(model.space());
  WorstCaseResult out;
  out.per_point.reserve(plan.theta_grid.size());
  std::size_t argmax = 0;
  for (std::size_t g = 0; g < plan.theta_grid.size(); ++g) {
    out.per_point.push_back(monte_carlo_risk(model, quantizer, estimator,
                                             plan.theta_grid[g], plan, loss,
                                             order, g, policy, jobs));
    if (out.per_point[g].mean > out.per_point[argmax].mean) argmax = g;
  }
  out.worst = out.per_point[argmax];
  return out;
}

std::vector<std::vector<double>> make_theta_grid(const ParameterSpace& space,
                                                 int points_per_coordinate,
                                                 std::uint64_t seed) {
  if (points_per_coordinate < 1) {
    throw std::invalid_argument("make_theta_grid: needs >= 1 point");
  }
  const int d = space.d;
  const double B = space.B;
  std::vector<std::vector<double>> grid;
  if (d <= 3) {
    std::vector<double> axis(points_per_coordinate);
    for (int i = 0; i < points_per_coordinate; ++i) {
      axis[i] = (points_per_coordinate == 1)
                    ? 0.0
                    : -B + 2.0 * B * i / (points_per_coordinate - 1);
    }
    std::vector<int> idx(d, 0);
    while (true) {
      std::vector<double> t(d);
      for (int c = 0; c < d; ++c) t[c] = axis[idx[c]];
      grid.push_back(std::move(t));
      int c = 0;
      while (c < d && ++idx[c] == points_per_coordinate) idx[c++] = 0;
      if (c == d) break;
    }
  } else {
    grid.emplace_back(d, 0.0);
    for (int corner = 0; corner < (1 << d); ++corner) {
      std::vector<double> t(d);
      for (int c = 0; c < d; ++c) t[c] = ((corner >> c) & 1) ? B : -B;
      grid.push_back(std::move(t));
    }
    RandomStream rng(seed);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> t(d);
      for (double& v : t) v = rng.uniform(-B, B);
      grid.push_back(std::move(t));
    }
  }
  return grid;
}

}  // namespace qdest
