#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "qdest/risk.hpp"
#include "qdest/special.hpp"

using namespace qdest;

namespace {

// Gaussian that denies being a location family, for the rejection path.
class NonLocationGaussian : public GaussianLocation {
 public:
  using GaussianLocation::GaussianLocation;
  bool location_family() const override { return false; }
};

// Always returns the origin; gives every trial the same loss.
class PinnedEstimator : public Estimator {
 public:
  std::string name() const override { return "pinned"; }
  bool needs_messages() const override { return false; }
  std::vector<double> estimate(const TrialData& trial, const Quantizer*,
                               const ParametricModel&) const override {
    return std::vector<double>(trial.d, 0.0);
  }
};

// Fails whenever the first sample exceeds a threshold.
class FlakyEstimator : public Estimator {
 public:
  explicit FlakyEstimator(double threshold) : threshold_(threshold) {}
  std::string name() const override { return "flaky"; }
  bool needs_messages() const override { return false; }
  bool needs_samples() const override { return true; }
  std::vector<double> estimate(const TrialData& trial, const Quantizer*,
                               const ParametricModel&) const override {
    if (trial.samples[0] > threshold_) {
      throw std::runtime_error("flaky estimator refused the trial");
    }
    double total = 0.0;
    for (double v : trial.samples) total += v;
    return {total / static_cast<double>(trial.samples.size())};
  }

 private:
  double threshold_;
};

}  // namespace

TEST_CASE("lp loss sums coordinatewise absolute powers") {
  const std::vector<double> a = {0.5, -0.25};
  const std::vector<double> b = {0.0, 0.25};
  CHECK(lp_loss(a, b, LossOrder::of(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lp_loss(a, b, LossOrder::of(3.0)) ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lp_loss(a, b, LossOrder::of(1.5)) ==
        doctest::Approx(2.0 * std::pow(0.5, 1.5)).epsilon(1e-14));
  const std::vector<double> short_vec = {1.0};
  CHECK_THROWS_AS((void)lp_loss(a, short_vec, LossOrder::of(2.0)),
                  std::invalid_argument);
}

TEST_CASE("translate-family transport cost reduces to the parameter gap") {
  GaussianLocation gauss(1.0, ParameterSpace(2, 2.0));
  const std::vector<double> theta_hat = {0.7, -0.3};
  const std::vector<double> theta = {0.2, 0.1};
  for (double p : {1.5, 2.0, 3.0}) {
    const LossOrder order = LossOrder::of(p);
    CHECK(wasserstein_pp_location(gauss, theta_hat, theta, order) ==
          doctest::Approx(lp_loss(theta_hat, theta, order)).epsilon(1e-14));
  }
  NonLocationGaussian other(1.0, ParameterSpace(2, 2.0));
  CHECK_THROWS_AS((void)wasserstein_pp_location(other, theta_hat, theta,
                                                LossOrder::of(2.0)),
                  std::invalid_argument);
}

TEST_CASE("quantile coupling recovers translate costs") {
  RandomStream rng(777);
  for (int rep = 0; rep < 4; ++rep) {
    const double delta =
        (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.25, 2.5);
    const double p = (rep % 2 == 0) ? 2.0 : 3.0;
    const LossOrder order = LossOrder::of(p);
    const double exact = std::pow(std::fabs(delta), p);
    const double via_quantiles = wasserstein_pp_quantile(
        [](double x) { return normal_cdf(x); },
        [delta](double x) { return normal_cdf(x - delta); }, order);
    CHECK(std::fabs(via_quantiles - exact) < 1e-4 * exact);
  }

  // Laplace translates as well: the coupling is distribution-free.
  LaplaceLocation laplace(1.0, ParameterSpace(1, 2.0));
  const double via_laplace = wasserstein_pp_quantile(
      [&](double x) { return laplace.coordinate_cdf(x, 0.0); },
      [&](double x) { return laplace.coordinate_cdf(x, 0.8); },
      LossOrder::of(2.0));
  CHECK(std::fabs(via_laplace - 0.64) < 1e-4 * 0.64);
}

TEST_CASE("quantile coupling separates different scales") {
  // W_2^2(N(0,1), N(0,4)) = (2 - 1)^2 = 1.
  const double value = wasserstein_pp_quantile(
      [](double x) { return normal_cdf(x); },
      [](double x) { return normal_cdf(x / 2.0); }, LossOrder::of(2.0));
  CHECK(std::fabs(value - 1.0) < 1e-3);
  CHECK_THROWS_AS((void)wasserstein_pp_quantile(
                      [](double x) { return normal_cdf(x); },
                      [](double x) { return normal_cdf(x); },
                      LossOrder::of(2.0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)wasserstein_pp_quantile(
                      [](double x) { return normal_cdf(x); },
                      [](double x) { return normal_cdf(x); },
                      LossOrder::of(2.0), 0.3),
                  std::invalid_argument);
}

TEST_CASE("monte carlo risk matches the sample-mean law") {
  GaussianLocation model(1.0, ParameterSpace(2, 1.0));
  SampleMeanEstimator estimator;
  SimulationPlan plan;
  plan.n = 50;
  plan.trials = 4000;
  plan.master_seed = 90125;
  plan.theta_grid = {{0.0, 0.0}};
  const std::vector<double> theta = {0.0, 0.0};
  const auto risk = monte_carlo_risk(model, nullptr, estimator, theta, plan,
                                     LossKind::Lp, LossOrder::of(2.0));
  // E||mean - theta||^2 = sigma^2 d / n = 0.04; clipping at B = 1 is a
  // seven-sigma event and does not matter at this precision.
  CHECK(std::fabs(risk.mean - 0.04) < 3e-3);
  CHECK(risk.std_error_valid);
  // Loss is (sigma^2/n) chi^2_2, so Var = 2 d (sigma^2/n)^2.
  const double predicted_se = std::sqrt(2.0 * 2.0 * 0.02 * 0.02 / 4000.0);
  CHECK(risk.std_error > 0.5 * predicted_se);
  CHECK(risk.std_error < 2.0 * predicted_se);
  CHECK(risk.trials == 4000);
  CHECK(risk.theta == theta);
}

TEST_CASE("risk evaluation is bit-identical across policies and jobs") {
  GaussianLocation model(1.0, ParameterSpace(1, 1.0));
  SignQuantizer quantizer(1);
  SignInversionEstimator estimator;
  SimulationPlan plan;
  plan.n = 200;
  plan.trials = 500;
  plan.master_seed = 555888;
  plan.theta_grid = {{0.4}};
  const std::vector<double> theta = {0.4};
  const auto serial =
      monte_carlo_risk(model, &quantizer, estimator, theta, plan, LossKind::Lp,
                       LossOrder::of(2.0), 7, ExecPolicy::Serial);
  const auto parallel =
      monte_carlo_risk(model, &quantizer, estimator, theta, plan, LossKind::Lp,
                       LossOrder::of(2.0), 7, ExecPolicy::Parallel);
  const auto parallel3 =
      monte_carlo_risk(model, &quantizer, estimator, theta, plan, LossKind::Lp,
                       LossOrder::of(2.0), 7, ExecPolicy::Parallel, 3);
  CHECK(std::memcmp(&serial.mean, &parallel.mean, sizeof(double)) == 0);
  CHECK(std::memcmp(&serial.std_error, &parallel.std_error, sizeof(double)) == 0);
  CHECK(std::memcmp(&parallel.mean, &parallel3.mean, sizeof(double)) == 0);
  CHECK(std::memcmp(&parallel.std_error, &parallel3.std_error, sizeof(double)) ==
        0);

  // Different stream indices decorrelate the draws.
  const auto other_stream =
      monte_carlo_risk(model, &quantizer, estimator, theta, plan, LossKind::Lp,
                       LossOrder::of(2.0), 8, ExecPolicy::Serial);
  CHECK(serial.mean != other_stream.mean);
}

TEST_CASE("failing trials are dropped and persistent failure aborts") {
  GaussianLocation model(1.0, ParameterSpace(1, 1.0));
  SimulationPlan plan;
  plan.n = 20;
  plan.trials = 100;
  plan.master_seed = 2024;
  plan.theta_grid = {{0.0}};
  const std::vector<double> theta = {0.0};

  // Threshold 2 fails on roughly 2% of trials: dropped, not fatal.
  FlakyEstimator sometimes(2.0);
  const auto risk = monte_carlo_risk(model, nullptr, sometimes, theta, plan,
                                     LossKind::Lp, LossOrder::of(2.0));
  CHECK(risk.trials < 100);
  CHECK(risk.trials >= 91);
  CHECK(std::isfinite(risk.mean));

  // The dropped set is positional, so both policies agree exactly.
  const auto serial =
      monte_carlo_risk(model, nullptr, sometimes, theta, plan, LossKind::Lp,
                       LossOrder::of(2.0), 0, ExecPolicy::Serial);
  CHECK(serial.trials == risk.trials);
  CHECK(serial.mean == risk.mean);

  // Threshold below every draw fails everything: abort.
  FlakyEstimator always(-100.0);
  CHECK_THROWS_AS((void)monte_carlo_risk(model, nullptr, always, theta, plan,
                                         LossKind::Lp, LossOrder::of(2.0)),
                  std::runtime_error);
}

TEST_CASE("worst case scan keeps the first point among exact ties") {
  GaussianLocation model(1.0, ParameterSpace(1, 1.0));
  PinnedEstimator estimator;
  SimulationPlan plan;
  plan.n = 5;
  plan.trials = 50;
  plan.master_seed = 31;
  plan.theta_grid = {{0.3}, {-0.3}, {0.0}};
  const auto result = worst_case_risk(model, nullptr, estimator, plan,
                                      LossKind::Lp, LossOrder::of(2.0));
  REQUIRE(result.per_point.size() == 3);
  // The pinned estimator loses exactly theta^2 every trial, so the two
  // outer points tie bitwise and the first one must win.
  CHECK(result.per_point[0].mean == result.per_point[1].mean);
  CHECK(result.worst.theta == std::vector<double>{0.3});
  CHECK(result.worst.mean == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(result.per_point[2].mean == 0.0);
}

TEST_CASE("parameter grids cover the cube as documented") {
  const auto line = make_theta_grid(ParameterSpace(1, 2.0), 9);
  REQUIRE(line.size() == 9);
  CHECK(line.front() == std::vector<double>{-2.0});
  CHECK(line.back() == std::vector<double>{2.0});
  bool has_center = false;
  for (const auto& t : line) has_center = has_center || t == std::vector<double>{0.0};
  CHECK(has_center);

  const auto square = make_theta_grid(ParameterSpace(2, 1.0), 5);
  CHECK(square.size() == 25);
  int corners = 0;
  for (const auto& t : square) {
    if (std::fabs(t[0]) == 1.0 && std::fabs(t[1]) == 1.0) ++corners;
  }
  CHECK(corners == 4);

  const auto cube = make_theta_grid(ParameterSpace(3, 1.0), 3);
  CHECK(cube.size() == 27);

  const auto single = make_theta_grid(ParameterSpace(2, 1.0), 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == std::vector<double>{0.0, 0.0});

  // High dimension switches to center + corners + 200 seeded uniforms.
  const ParameterSpace high(4, 1.5);
  const auto scattered = make_theta_grid(high, 9);
  CHECK(scattered.size() == 1 + 16 + 200);
  for (const auto& t : scattered) {
    REQUIRE(t.size() == 4);
    CHECK(high.contains(t));
  }
  // Same seed, same grid; the scatter is reproducible.
  CHECK(scattered == make_theta_grid(high, 9));

  CHECK_THROWS_AS((void)make_theta_grid(ParameterSpace(1, 1.0), 0),
                  std::invalid_argument);
}
