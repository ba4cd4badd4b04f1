#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace qdest {

// Raised when an iterative numeric routine fails to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Gauss-Kronrod (7, 15) integration of f over [a, b].
// Bisects the interval with the largest error estimate until the global
// estimate satisfies max(abs_tol, rel_tol * |value|); throws NumericError
// with diagnostics if the interval budget is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-8, int max_intervals = 4000);

// Sums values[0..n) by recursive halving in ascending index order.
// The result depends only on the contents, not on the caller's thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace qdest
