#include "qdest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdest {

namespace {

double clip(double x, double B) { return std::clamp(x, -B, B); }

// Golden-section maximum of f on [a, b] to absolute tolerance tol.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  constexpr double kInvPhi = 0.61803398874989485;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void SimulationPlan::validate(const ParameterSpace& space) const {
  if (n < 1) throw std::invalid_argument("SimulationPlan: n must be >= 1");
  if (k < 1) throw std::invalid_argument("SimulationPlan: k must be >= 1");
  if (trials < 1) {
    throw std::invalid_argument("SimulationPlan: trials must be >= 1");
  }
  if (theta_grid.empty()) {
    throw std::invalid_argument("SimulationPlan: theta grid must be nonempty");
  }
  for (const auto& theta : theta_grid) space.require_inside(theta);
}

std::vector<double> SignInversionEstimator::estimate(
    const TrialData& trial, const Quantizer* quantizer,
    const ParametricModel& model) const {
  const auto* sign = dynamic_cast<const SignQuantizer*>(quantizer);
  if (sign == nullptr) {
    throw std::invalid_argument("sign_inversion requires a sign quantizer");
  }
  if (!model.location_family()) {
    throw std::invalid_argument("sign_inversion requires a location family");
  }
  const int d = trial.d;
  const int k = sign->bits();
  const double B = model.space().B;
  const double thr = sign->threshold();
  std::vector<long> ones(d, 0), totals(d, 0);
  for (long j = 0; j < trial.n; ++j) {
    const int pattern = trial.messages[j] - 1;
    for (int t = 0; t < k; ++t) {
      const int c = static_cast<int>((j * k + t) % d);
      ones[c] += (pattern >> t) & 1;
      totals[c] += 1;
    }
  }
  std::vector<double> theta_hat(d, 0.0);
  for (int c = 0; c < d; ++c) {
    if (totals[c] == 0) continue;
    if (ones[c] == 0) {
      theta_hat[c] = -B;
    } else if (ones[c] == totals[c]) {
      theta_hat[c] = B;
    } else {
      const double phat =
          static_cast<double>(ones[c]) / static_cast<double>(totals[c]);
      theta_hat[c] = clip(thr - model.coordinate_quantile(1.0 - phat, 0.0), B);
    }
  }
  return theta_hat;
}

std::vector<double> QuantizedMlEstimator::estimate(
    const TrialData& trial, const Quantizer* quantizer,
    const ParametricModel& model) const {
  if (quantizer == nullptr) {
    throw std::invalid_argument("quantized_ml requires a quantizer");
  }
  const int d = trial.d;
  const double B = model.space().B;
  const int alphabet = quantizer->alphabet_size();

  // Group sensors by observed coordinate and tally message counts; the
  // shipped quantizers are sensor-homogeneous, so one representative sensor
  // per coordinate determines the cell masses.
  const auto* grid = dynamic_cast<const GridQuantizer*>(quantizer);
  std::vector<std::vector<long>> counts(d, std::vector<long>(alphabet, 0));
  std::vector<long> representative(d, -1);
  for (long j = 0; j < trial.n; ++j) {
    int c;
    if (grid != nullptr) {
      c = static_cast<int>(j % d);
    } else {
      const auto coords = quantizer->assigned_coordinates(j + 1, d);
      if (coords.size() != 1) {
        throw std::invalid_argument(
            "quantized_ml requires single-coordinate sensors");
      }
      c = coords[0];
    }
    counts[c][trial.messages[j] - 1] += 1;
    if (representative[c] < 0) representative[c] = j + 1;
  }
  std::vector<double> theta_hat(d, 0.0);
  std::vector<double> theta_point(d, 0.0);
  for (int c = 0; c < d; ++c) {
    if (representative[c] < 0) continue;
    long total = 0;
    for (long cnt : counts[c]) total += cnt;
    if (grid != nullptr) {
      // All mass in an overflow cell: the likelihood is monotone and the
      // maximum sits at the nearer boundary.
      if (counts[c][0] == total) {
        theta_hat[c] = -B;
        continue;
      }
      if (counts[c][alphabet - 1] == total) {
        theta_hat[c] = B;
        continue;
      }
    }
    const long sensor = representative[c];
    const auto log_likelihood = [&](double t) {
      theta_point[c] = t;
      double acc = 0.0;
      for (int m = 1; m <= alphabet; ++m) {
        if (counts[c][m - 1] == 0) continue;
        const double mass =
            quantizer->message_likelihood(model, sensor, theta_point, m);
        acc += (mass > 0.0) ? counts[c][m - 1] * std::log(mass) : -1e300;
      }
      return acc;
    };
    theta_hat[c] = golden_max(log_likelihood, -B, B, 1e-8);
    theta_point[c] = 0.0;
  }
  return theta_hat;
}

std::vector<double> SampleMeanEstimator::estimate(
    const TrialData& trial, const Quantizer* /*quantizer*/,
    const ParametricModel& model) const {
  const int d = trial.d;
  const double B = model.space().B;
  std::vector<double> theta_hat(d, 0.0);
  if (trial.n == 0) return theta_hat;
  for (long j = 0; j < trial.n; ++j) {
    for (int c = 0; c < d; ++c) theta_hat[c] += trial.samples[j * d + c];
  }
  for (int c = 0; c < d; ++c) {
    theta_hat[c] = clip(theta_hat[c] / static_cast<double>(trial.n), B);
  }
  return theta_hat;
}

}  // namespace qdest
