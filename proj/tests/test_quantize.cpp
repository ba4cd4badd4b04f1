#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "doctest.h"
#include "qdest/models.hpp"
#include "qdest/quantize.hpp"

using namespace qdest;

namespace {

const GaussianLocation kGauss2(1.0, ParameterSpace(2, 1.0));
const LaplaceLocation kLaplace1(0.8, ParameterSpace(1, 1.0));

double fd_log_likelihood(const Quantizer& quantizer, const ParametricModel& model,
                         long sensor, std::vector<double> theta, int message,
                         int coord) {
  const double h = 1e-6;
  theta[coord] += h;
  const double up = std::log(quantizer.message_likelihood(model, sensor, theta, message));
  theta[coord] -= 2.0 * h;
  const double down =
      std::log(quantizer.message_likelihood(model, sensor, theta, message));
  return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("sign quantizer assigns coordinates round robin") {
  SignQuantizer quantizer(2);
  CHECK(quantizer.assigned_coordinates(1, 3) == std::vector<int>{0, 1});
  CHECK(quantizer.assigned_coordinates(2, 3) == std::vector<int>{2, 0});
  CHECK(quantizer.assigned_coordinates(3, 3) == std::vector<int>{1, 2});
  CHECK(quantizer.assigned_coordinates(1, 1) == std::vector<int>{0, 0});
  SignQuantizer one_bit(1);
  CHECK(one_bit.assigned_coordinates(5, 2) == std::vector<int>{0});
  CHECK(one_bit.assigned_coordinates(6, 2) == std::vector<int>{1});
}

TEST_CASE("message likelihoods are probability distributions") {
  const std::vector<const Quantizer*> quantizers = [] {
    static SignQuantizer sign1(1);
    static SignQuantizer sign2(2);
    static GridQuantizer grid3(3, 4.0);
    return std::vector<const Quantizer*>{&sign1, &sign2, &grid3};
  }();
  for (const auto* quantizer : quantizers) {
    for (long sensor : {1L, 2L, 7L}) {
      for (double t : {-0.9, 0.0, 0.5}) {
        const std::vector<double> theta = {t, -t / 2.0};
        double total = 0.0;
        for (int m = 1; m <= quantizer->alphabet_size(); ++m) {
          const double mass =
              quantizer->message_likelihood(kGauss2, sensor, theta, m);
          CHECK(mass >= 0.0);
          total += mass;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("encoded message frequencies match the likelihood") {
  GridQuantizer quantizer(2, 2.0);
  const std::vector<double> theta = {0.3};
  RandomStream rng(321);
  std::map<int, long> counts;
  const int m = 200000;
  std::vector<double> x;
  for (int i = 0; i < m; ++i) {
    x.clear();
    kLaplace1.sample(theta, 1, rng, x);
    ++counts[quantizer.encode(1, x, rng)];
  }
  for (int message = 1; message <= 4; ++message) {
    const double expected =
        quantizer.message_likelihood(kLaplace1, 1, theta, message);
    const double observed = static_cast<double>(counts[message]) / m;
    const double band = 4.0 * std::sqrt(expected * (1.0 - expected) / m) + 1e-4;
    CHECK(std::fabs(observed - expected) < band);
  }
}

TEST_CASE("sign encoding thresholds each assigned coordinate") {
  SignQuantizer quantizer(1, 0.25);
  RandomStream rng(1);
  const std::vector<double> above = {0.5, -2.0};
  const std::vector<double> below = {0.1, 3.0};
  const int high = quantizer.encode(1, above, rng);
  const int low = quantizer.encode(1, below, rng);
  CHECK(high != low);
  // Sensor 2 reads coordinate 1 in d = 2.
  CHECK(quantizer.encode(2, above, rng) == low);
  CHECK(quantizer.encode(2, below, rng) == high);
}

TEST_CASE("message scores match finite differences and have zero mean") {
  static SignQuantizer sign2(2);
  static GridQuantizer grid3(3, 3.0);
  const std::vector<const Quantizer*> quantizers = {&sign2, &grid3};
  for (const auto* quantizer : quantizers) {
    for (long sensor : {1L, 3L}) {
      const std::vector<double> theta = {0.2, -0.6};
      for (int coord = 0; coord < 2; ++coord) {
        double mean_score = 0.0;
        for (int message = 1; message <= quantizer->alphabet_size(); ++message) {
          const double mass =
              quantizer->message_likelihood(kGauss2, sensor, theta, message);
          if (mass < 1e-14) continue;
          const double score =
              quantizer->message_score(kGauss2, sensor, theta, message, coord);
          CHECK(score == doctest::Approx(fd_log_likelihood(
                             *quantizer, kGauss2, sensor, theta, message, coord))
                             .epsilon(2e-5));
          mean_score += mass * score;
        }
        CHECK(std::fabs(mean_score) < 1e-9);
      }
    }
  }
}

TEST_CASE("scores vanish for coordinates the sensor does not observe") {
  SignQuantizer quantizer(1);
  const std::vector<double> theta = {0.1, 0.4};
  // Sensor 1 observes coordinate 0 only.
  CHECK(quantizer.message_score(kGauss2, 1, theta, 1, 1) == 0.0);
  CHECK(quantizer.message_score(kGauss2, 1, theta, 2, 1) == 0.0);
}

TEST_CASE("duplicate sign bits are perfectly correlated") {
  // d = 1 with k = 3: every bit thresholds the same coordinate, so only the
  // all-zeros and all-ones messages carry mass.
  SignQuantizer quantizer(3);
  GaussianLocation model(1.0, ParameterSpace(1, 1.0));
  const std::vector<double> theta = {0.3};
  double total = 0.0;
  int supported = 0;
  for (int message = 1; message <= 8; ++message) {
    const double mass = quantizer.message_likelihood(model, 1, theta, message);
    total += mass;
    if (mass > 0.0) ++supported;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(supported == 2);

  RandomStream rng(9);
  std::vector<double> x = {0.7};
  const int all_above = quantizer.encode(1, x, rng);
  x[0] = -0.7;
  const int all_below = quantizer.encode(1, x, rng);
  CHECK(quantizer.message_likelihood(model, 1, theta, all_above) > 0.0);
  CHECK(quantizer.message_likelihood(model, 1, theta, all_below) > 0.0);
  CHECK(all_above != all_below);

  // Scoring a zero-probability (contradictory) message is an error.
  for (int message = 1; message <= 8; ++message) {
    if (message == all_above || message == all_below) continue;
    CHECK_THROWS_AS(
        (void)quantizer.message_score(model, 1, theta, message, 0),
        std::domain_error);
  }
}

TEST_CASE("grid cells tile the line and encode consistently") {
  GridQuantizer quantizer(3, 2.0, 0.5);
  CHECK(quantizer.cell_bounds(1).first == -std::numeric_limits<double>::infinity());
  CHECK(quantizer.cell_bounds(1).second == doctest::Approx(-1.5));
  CHECK(quantizer.cell_bounds(8).second == std::numeric_limits<double>::infinity());
  CHECK(quantizer.cell_bounds(8).first == doctest::Approx(2.5));
  double prev = -std::numeric_limits<double>::infinity();
  for (int message = 1; message <= 8; ++message) {
    const auto [lo, hi] = quantizer.cell_bounds(message);
    if (message == 1) {
      CHECK(std::isinf(lo));
    } else {
      CHECK(lo == doctest::Approx(prev));
    }
    CHECK(hi > lo);
    prev = hi;
  }

  RandomStream rng(2);
  for (double x : {-5.0, -1.50000001, -1.1, 0.49, 2.49, 2.5, 7.0}) {
    const std::vector<double> vec = {x};
    const int message = quantizer.encode(1, vec, rng);
    const auto [lo, hi] = quantizer.cell_bounds(message);
    CHECK(x >= lo);
    CHECK(x < hi);
  }
}

TEST_CASE("grid likelihood equals the cdf mass of the cell") {
  GridQuantizer quantizer(2, 1.5);
  const std::vector<double> theta = {-0.2};
  for (int message = 1; message <= 4; ++message) {
    const auto [lo, hi] = quantizer.cell_bounds(message);
    const double expected =
        kLaplace1.coordinate_cdf(std::isinf(hi) ? 1e9 : hi, theta[0]) -
        kLaplace1.coordinate_cdf(std::isinf(lo) ? -1e9 : lo, theta[0]);
    CHECK(quantizer.message_likelihood(kLaplace1, 1, theta, message) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("quantizer construction validates the bit budget") {
  CHECK_THROWS_AS(SignQuantizer(0), std::invalid_argument);
  CHECK_THROWS_AS(SignQuantizer(17), std::invalid_argument);
  CHECK_THROWS_AS(GridQuantizer(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridQuantizer(2, -1.0), std::invalid_argument);
  CHECK_NOTHROW(SignQuantizer(16));
  CHECK_NOTHROW(GridQuantizer(2, 1.0));

  SignQuantizer quantizer(1);
  const std::vector<double> theta = {0.0, 0.0};
  CHECK_THROWS_AS(
      (void)quantizer.message_likelihood(kGauss2, 1, theta, 3),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)quantizer.message_likelihood(kGauss2, 0, theta, 1), std::invalid_argument);
}
