#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qdest/special.hpp"

using namespace qdest;

namespace {

// Independent oracle: Phi(x) = erfc(-x / sqrt(2)) / 2.
double phi_oracle(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Second oracle: the Taylor series Phi(x) = 1/2 + phi(x) sum x^(2j+1)/(2j+1)!!,
// convergent for moderate |x|.
double phi_series(double x) {
  double term = x;
  double sum = x;
  for (int j = 1; j < 200; ++j) {
    term *= x * x / (2.0 * j + 1.0);
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return 0.5 + normal_pdf(x) * sum;
}

}  // namespace

TEST_CASE("normal cdf matches the erfc and series oracles") {
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    CHECK(normal_cdf(x) == doctest::Approx(phi_oracle(x)).epsilon(1e-14));
  }
  for (double x = -5.0; x <= 5.0; x += 0.125) {
    CHECK(normal_cdf(x) == doctest::Approx(phi_series(x)).epsilon(1e-12));
  }
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(-40.0) == 0.0);
  CHECK(normal_cdf(40.0) == 1.0);
}

TEST_CASE("normal pdf integrates to the cdf increments") {
  // Simpson's rule on [a, b] against Phi(b) - Phi(a).
  const double a = -3.0, b = 2.0;
  const int m = 20000;
  const double h = (b - a) / m;
  double simpson = normal_pdf(a) + normal_pdf(b);
  for (int i = 1; i < m; ++i) {
    simpson += (i % 2 == 1 ? 4.0 : 2.0) * normal_pdf(a + i * h);
  }
  simpson *= h / 3.0;
  CHECK(simpson == doctest::Approx(normal_cdf(b) - normal_cdf(a)).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the cdf to high accuracy") {
  for (double x = -7.5; x <= 7.5; x += 0.0625) {
    const double u = normal_cdf(x);
    if (u <= 0.0 || u >= 1.0) continue;
    // Rounding u to the nearest representable double already moves the exact
    // quantile by ulp(u)/pdf(x); budget that on top of the 1e-12 target.
    const double conditioning = (std::nextafter(u, 2.0) - u) / normal_pdf(x);
    CHECK(std::fabs(normal_quantile(u) - x) <=
          1e-12 * std::fabs(x) + 4.0 * conditioning);
  }
  for (double u = 1e-12; u < 1.0; u = (u < 0.5 ? u * 3.1 : 1.0 - (1.0 - u) / 3.1)) {
    CHECK(normal_cdf(normal_quantile(u)) == doctest::Approx(u).epsilon(1e-12));
    if (u > 0.99999) break;
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK_THROWS_AS((void)normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS((void)normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS((void)normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("log gamma matches the standard library over a wide grid") {
  for (double x = 0.05; x <= 50.0; x += 0.05) {
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(5e-14));
  }
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("gamma satisfies the recurrence and reflection identities") {
  for (double u = 0.1; u <= 10.0; u += 0.11) {
    // Gamma(u + 1) = u Gamma(u), compared in log space.
    CHECK(log_gamma(u + 1.0) ==
          doctest::Approx(std::log(u) + log_gamma(u)).epsilon(1e-10));
  }
  for (double u = 0.05; u < 1.0; u += 0.07) {
    // Gamma(u) Gamma(1 - u) = pi / sin(pi u).
    const double lhs = gamma_fn(u) * gamma_fn(1.0 - u);
    CHECK(lhs == doctest::Approx(M_PI / std::sin(M_PI * u)).epsilon(1e-10));
  }
}

TEST_CASE("beta agrees with its gamma representation") {
  for (double u = 0.1; u <= 10.0; u += 0.37) {
    for (double v = 0.1; v <= 10.0; v += 0.41) {
      const double direct = beta_fn(u, v);
      const double via_gamma =
          std::exp(std::lgamma(u) + std::lgamma(v) - std::lgamma(u + v));
      CHECK(direct == doctest::Approx(via_gamma).epsilon(1e-10));
      CHECK(direct == doctest::Approx(beta_fn(v, u)).epsilon(1e-12));
    }
  }
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK_THROWS_AS((void)beta_fn(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)gamma_fn(-1.0), std::domain_error);
}

TEST_CASE("beta matches direct numerical integration of its defining integral") {
  // Midpoint rule on t^(u-1)(1-t)^(v-1); exponents > 1 keep it well behaved.
  auto beta_quad = [](double u, double v) {
    const int m = 400000;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = (i + 0.5) / m;
      sum += std::pow(t, u - 1.0) * std::pow(1.0 - t, v - 1.0);
    }
    return sum / m;
  };
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(beta_quad(2.0, 3.0)).epsilon(1e-9));
  CHECK(beta_fn(1.5, 2.5) == doctest::Approx(beta_quad(1.5, 2.5)).epsilon(1e-7));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

#include "qdest/quadrature.hpp"
#include "qdest/rng.hpp"

TEST_CASE("adaptive quadrature reproduces closed-form integrals") {
  const auto poly = integrate([](double t) { return t * t * t - 2.0 * t + 1.0; },
                              -1.0, 3.0);
  CHECK(poly.value == doctest::Approx(16.0).epsilon(1e-12));  // t^4/4 - t^2 + t

  const auto gauss = integrate([](double t) { return normal_pdf(t); }, -10.0, 10.0);
  CHECK(gauss.value == doctest::Approx(1.0).epsilon(1e-12));

  const auto osc = integrate([](double t) { return std::sin(10.0 * t); }, 0.0, M_PI);
  CHECK(osc.value == doctest::Approx((1.0 - std::cos(10.0 * M_PI)) / 10.0)
                         .epsilon(1e-10));

  // Integrable endpoint singularity: 1/sqrt(t) on (0, 1].
  const auto root = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0);
  CHECK(root.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("quadrature reports failure instead of a silent wrong value") {
  CHECK_THROWS_AS((void)integrate([](double t) { return std::sin(1.0 / t) / t; },
                                  1e-9, 1.0, 1e-14, 1e-14, 8),
                  NumericError);
}

TEST_CASE("pairwise summation is exact on a telescoping pattern") {
  std::vector<double> values;
  for (int i = 0; i < 4097; ++i) values.push_back(i % 2 == 0 ? 1.0 : -1.0);
  CHECK(pairwise_sum(values) == 1.0);
  values.assign(1000, 0.1);
  CHECK(pairwise_sum(values) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("derived seeds separate streams and reproduce exactly") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
  CHECK(derive_seed(0, 0, 0) != 0);

  RandomStream a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double ua = a.uniform01();
    all_equal = all_equal && ua == b.uniform01();
    any_diff = any_diff || ua != c.uniform01();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform01 stays strictly inside the unit interval") {
  RandomStream rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("normal draws have the right first moments") {
  RandomStream rng(99);
  const int m = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::fabs(sum / m) < 0.01);
  CHECK(sumsq / m == doctest::Approx(1.0).epsilon(0.01));
}
