#include "qdest/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qdest {

namespace {

// 15-point Kronrod abscissae on [-1, 1] and weights; the even-index nodes
// form the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                           0.38183005050511894495, 0.41795918367346938776};

struct Interval {
  double a, b, value, error;
};

void gk15(const std::function<double(double)>& f, double a, double b,
          double* value, double* error) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  *value = kronrod * half;
  *error = std::fabs((kronrod - gauss) * half);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, double rel_tol,
                           int max_intervals) {
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("integrate: endpoints must be finite");
  }
  QuadratureResult out;
  if (a == b) return out;

  std::vector<Interval> intervals;
  Interval first{a, b, 0.0, 0.0};
  gk15(f, a, b, &first.value, &first.error);
  intervals.push_back(first);
  out.evaluations = 15;

  auto worse = [](const Interval& x, const Interval& y) {
    if (x.error != y.error) return x.error < y.error;
    return x.a < y.a;  // deterministic tie-break
  };

  while (true) {
    double total = 0.0, err = 0.0;
    for (const auto& iv : intervals) {
      total += iv.value;
      err += iv.error;
    }
    const double tol = std::max(abs_tol, rel_tol * std::fabs(total));
    if (err <= tol) {
      out.value = total;
      out.error_estimate = err;
      return out;
    }
    if (static_cast<int>(intervals.size()) >= max_intervals) {
      throw NumericError(
          "integrate: no convergence over [" + std::to_string(a) + ", " +
          std::to_string(b) + "]: value=" + std::to_string(total) +
          " error=" + std::to_string(err) + " tol=" + std::to_string(tol) +
          " intervals=" + std::to_string(intervals.size()));
    }
    auto it = std::max_element(intervals.begin(), intervals.end(), worse);
    const Interval split = *it;
    const double mid = 0.5 * (split.a + split.b);
    if (!(mid > split.a && mid < split.b)) {
      // Interval is at floating-point resolution; accept its estimate.
      it->error = 0.0;
      continue;
    }
    Interval left{split.a, mid, 0.0, 0.0}, right{mid, split.b, 0.0, 0.0};
    gk15(f, left.a, left.b, &left.value, &left.error);
    gk15(f, right.a, right.b, &right.value, &right.error);
    out.evaluations += 30;
    *it = left;
    intervals.push_back(right);
  }
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 4) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace qdest
