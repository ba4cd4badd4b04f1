#include "qdest/infogeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "qdest/quadrature.hpp"
#include "qdest/special.hpp"

namespace qdest {

namespace {

constexpr double kAbsTol = 1e-10;
constexpr double kRelTol = 1e-8;

double coordinate_score_moment(const ParametricModel& model, double theta_c,
                               double q) {
  const double H = model.integration_halfwidth();
  const auto res = integrate(
      [&](double x) {
        const double s = std::fabs(model.coordinate_score(x, theta_c));
        return model.coordinate_density(x, theta_c) * std::pow(s, q);
      },
      theta_c - H, theta_c + H, kAbsTol, kRelTol);
  return res.value;
}

// Expectation of f over the prior marginals of `coords`, the remaining
// coordinates of theta held at `base`.  Nested adaptive quadrature, capped
// at three integrated coordinates.
double prior_expectation(const Prior& prior, std::span<const int> coords,
                         std::vector<double>& theta, std::size_t level,
                         const std::function<double(std::span<const double>)>& f) {
  if (level == coords.size()) return f(theta);
  const double B = prior.space().B;
  const int c = coords[level];
  const auto res = integrate(
      [&](double t) {
        theta[c] = t;
        return prior.coordinate_density(t) *
               prior_expectation(prior, coords, theta, level + 1, f);
      },
      -B, B, kAbsTol, kRelTol);
  theta[c] = 0.0;
  return res.value;
}

double expect_over_coords(const Prior& prior, std::vector<int> coords,
                          const std::function<double(std::span<const double>)>& f) {
  if (coords.size() > 3) {
    throw std::logic_error(
        "prior expectation: more than 3 integrated coordinates unsupported");
  }
  std::vector<double> theta(prior.space().d, 0.0);
  return prior_expectation(prior, coords, theta, 0, f);
}

std::vector<int> unique_assigned(const Quantizer& quantizer, long sensor_index,
                                 int d) {
  std::vector<int> coords = quantizer.assigned_coordinates(sensor_index, d);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

double exp_moment(const ScalarLaw& law, double K, double r) {
  const auto term = [&](double z) {
    const double u = std::pow(std::fabs(z) / K, r);
    return (u > 700.0) ? std::numeric_limits<double>::infinity() : std::exp(u);
  };
  switch (law.kind) {
    case ScalarLaw::Kind::Atoms: {
      double acc = 0.0;
      for (std::size_t i = 0; i < law.atom_values.size(); ++i) {
        acc += law.atom_probs[i] * term(law.atom_values[i]);
        if (std::isinf(acc)) return acc;
      }
      return acc;
    }
    case ScalarLaw::Kind::Samples: {
      std::vector<double> vals(law.samples.size());
      for (std::size_t i = 0; i < law.samples.size(); ++i) {
        const double v = term(law.samples[i]);
        if (std::isinf(v)) return v;
        vals[i] = v;
      }
      return pairwise_sum(vals) / static_cast<double>(vals.size());
    }
    case ScalarLaw::Kind::Density: {
      try {
        const auto res = integrate(
            [&](double z) {
              const double u = std::pow(std::fabs(z) / K, r);
              if (u > 700.0) return 1e300;
              return law.pdf(z) * std::exp(u);
            },
            law.lo, law.hi, 1e-12, 1e-10);
        return res.value;
      } catch (const NumericError&) {
        // The integrand only misbehaves when K is far below the norm.
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  throw std::logic_error("exp_moment: unknown law kind");
}

}  // namespace

GeneralizedFisherResult generalized_fisher_x(const ParametricModel& model,
                                             std::span<const double> theta,
                                             const LossOrder& order) {
  model.space().require_inside(theta);
  GeneralizedFisherResult out;
  out.order = order;
  out.source = "raw";
  out.per_coordinate.resize(model.dimension());
  for (int c = 0; c < model.dimension(); ++c) {
    const double moment = coordinate_score_moment(model, theta[c], order.q);
    out.per_coordinate[c] = std::pow(moment, order.p - 1.0);
  }
  out.trace = pairwise_sum(out.per_coordinate);
  return out;
}

GeneralizedFisherResult generalized_fisher_message(const Quantizer& quantizer,
                                                   const ParametricModel& model,
                                                   long sensor_index,
                                                   std::span<const double> theta,
                                                   const LossOrder& order) {
  model.space().require_inside(theta);
  GeneralizedFisherResult out;
  out.order = order;
  out.source = "message";
  out.per_coordinate.assign(model.dimension(), 0.0);
  const auto coords = unique_assigned(quantizer, sensor_index,
                                      model.dimension());
  const int alphabet = quantizer.alphabet_size();
  for (int c : coords) {
    double moment = 0.0;
    for (int m = 1; m <= alphabet; ++m) {
      const double pm =
          quantizer.message_likelihood(model, sensor_index, theta, m);
      if (!(pm > 0.0)) continue;
      const double s =
          quantizer.message_score(model, sensor_index, theta, m, c);
      moment += pm * std::pow(std::fabs(s), order.q);
    }
    out.per_coordinate[c] = std::pow(moment, order.p - 1.0);
  }
  out.trace = pairwise_sum(out.per_coordinate);
  return out;
}

GeneralizedFisherResult prior_omega(const Prior& prior, const LossOrder& order) {
  GeneralizedFisherResult out;
  out.order = order;
  out.source = "prior";
  const int d = prior.space().d;
  const double B = prior.space().B;
  double per_coordinate;
  if (prior.has_closed_form_omega()) {
    if (!(order.p > 1.5)) {
      throw std::domain_error(
          "prior_omega: raised-cosine score moment requires p > 3/2");
    }
    const double p = order.p;
    const double u = (2.0 * p - 1.0) / (2.0 * p - 2.0);
    const double v = (2.0 * p - 3.0) / (2.0 * p - 2.0);
    per_coordinate = (M_PI / 2.0) * std::pow(2.0 / B, p) *
                     std::pow(beta_fn(u, v), p - 1.0);
  } else {
    const auto res = integrate(
        [&](double t) {
          return prior.coordinate_density(t) *
                 std::pow(std::fabs(prior.coordinate_score(t)), order.q);
        },
        -B, B, kAbsTol, kRelTol);
    per_coordinate = std::pow(res.value, order.p - 1.0);
  }
  out.per_coordinate.assign(d, per_coordinate);
  out.trace = pairwise_sum(out.per_coordinate);
  return out;
}

double expected_omega_x_root(const ParametricModel& model, const Prior& prior,
                             const LossOrder& order) {
  const double root = 1.0 / (order.p - 1.0);
  if (model.location_family()) {
    std::vector<double> center(model.dimension(), 0.0);
    return std::pow(generalized_fisher_x(model, center, order).trace, root);
  }
  std::vector<int> coords(model.dimension());
  for (int c = 0; c < model.dimension(); ++c) coords[c] = c;
  return expect_over_coords(prior, coords, [&](std::span<const double> theta) {
    return std::pow(generalized_fisher_x(model, theta, order).trace, root);
  });
}

double expected_fisher_trace_x(const ParametricModel& model,
                               const Prior& prior) {
  const LossOrder two = LossOrder::of(2.0);
  if (model.location_family()) {
    std::vector<double> center(model.dimension(), 0.0);
    return generalized_fisher_x(model, center, two).trace;
  }
  std::vector<int> coords(model.dimension());
  for (int c = 0; c < model.dimension(); ++c) coords[c] = c;
  return expect_over_coords(prior, coords, [&](std::span<const double> theta) {
    return generalized_fisher_x(model, theta, two).trace;
  });
}

double expected_omega_message_root(const Quantizer& quantizer,
                                   const ParametricModel& model,
                                   const Prior& prior, long sensor_index,
                                   const LossOrder& order) {
  const double root = 1.0 / (order.p - 1.0);
  const auto coords = unique_assigned(quantizer, sensor_index,
                                      model.dimension());
  return expect_over_coords(prior, coords, [&](std::span<const double> theta) {
    return std::pow(
        generalized_fisher_message(quantizer, model, sensor_index, theta, order)
            .trace,
        root);
  });
}

double expected_fisher_trace_message(const Quantizer& quantizer,
                                     const ParametricModel& model,
                                     const Prior& prior, long sensor_index) {
  const LossOrder two = LossOrder::of(2.0);
  const auto coords = unique_assigned(quantizer, sensor_index,
                                      model.dimension());
  return expect_over_coords(prior, coords, [&](std::span<const double> theta) {
    return generalized_fisher_message(quantizer, model, sensor_index, theta, two)
        .trace;
  });
}

double expected_mean_derivative(const ParametricModel& model,
                                const Prior& prior, int coord) {
  if (model.location_family()) return 1.0;
  std::vector<int> coords(model.dimension());
  for (int c = 0; c < model.dimension(); ++c) coords[c] = c;
  return expect_over_coords(prior, coords, [&](std::span<const double> theta) {
    return model.mean_functional_derivative(theta, coord);
  });
}

double orlicz_norm(const ScalarLaw& law, double r) {
  if (!(r >= 1.0)) throw std::domain_error("orlicz_norm: requires r >= 1");
  double lo = 1e-8, hi = 1e6;
  if (exp_moment(law, lo, r) <= 2.0) return 0.0;
  if (exp_moment(law, hi, r) > 2.0) {
    return std::numeric_limits<double>::infinity();
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (exp_moment(law, mid, r) > 2.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

OrliczCertificate score_projection_bound(const ParametricModel& model, double r,
                                         int theta_grid_points,
                                         int direction_count,
                                         std::uint64_t seed) {
  if (theta_grid_points < 1 || direction_count < 0) {
    throw std::invalid_argument("score_projection_bound: bad grid sizes");
  }
  const int d = model.dimension();
  const double B = model.space().B;

  std::vector<std::vector<double>> thetas;
  if (d <= 3) {
    std::vector<double> axis(theta_grid_points);
    for (int i = 0; i < theta_grid_points; ++i) {
      axis[i] = (theta_grid_points == 1)
                    ? 0.0
                    : -B + 2.0 * B * i / (theta_grid_points - 1);
    }
    std::vector<int> idx(d, 0);
    while (true) {
      std::vector<double> t(d);
      for (int c = 0; c < d; ++c) t[c] = axis[idx[c]];
      thetas.push_back(std::move(t));
      int c = 0;
      while (c < d && ++idx[c] == theta_grid_points) idx[c++] = 0;
      if (c == d) break;
    }
  } else {
    RandomStream rng(derive_seed(seed, 1));
    thetas.emplace_back(d, 0.0);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> t(d);
      for (double& v : t) v = rng.uniform(-B, B);
      thetas.push_back(std::move(t));
    }
  }

  std::vector<std::vector<double>> directions;
  for (int c = 0; c < d; ++c) {
    std::vector<double> e(d, 0.0);
    e[c] = 1.0;
    directions.push_back(std::move(e));
  }
  RandomStream rng(derive_seed(seed, 2));
  for (int i = 0; i < direction_count; ++i) {
    std::vector<double> u(d);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& v : u) {
        v = rng.normal();
        norm2 += v * v;
      }
    } while (!(norm2 > 1e-12));
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : u) v *= inv;
    directions.push_back(std::move(u));
  }

  OrliczCertificate cert;
  cert.r = r;
  cert.theta_grid_points = theta_grid_points;
  cert.direction_count = direction_count;
  cert.value = -1.0;
  std::map<std::string, double> memo;
  for (const auto& theta : thetas) {
    for (const auto& u : directions) {
      const ScalarLaw law = model.score_projection_law(theta, u);
      double norm;
      if (!law.key.empty()) {
        auto it = memo.find(law.key);
        if (it == memo.end()) {
          norm = orlicz_norm(law, r);
          memo.emplace(law.key, norm);
        } else {
          norm = it->second;
        }
      } else {
        norm = orlicz_norm(law, r);
      }
      if (norm > cert.value) {
        cert.value = norm;
        cert.argmax_theta = theta;
        cert.argmax_direction = u;
      }
    }
  }
  return cert;
}

}  // namespace qdest
