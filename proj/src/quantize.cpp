#include "qdest/quantize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdest {

void Quantizer::check_message(int message, int alphabet) {
  if (message < 1 || message > alphabet) {
    throw std::invalid_argument("message outside [1, 2^k]");
  }
}

void Quantizer::check_sensor(long sensor_index) {
  if (sensor_index < 1) {
    throw std::invalid_argument("sensor indices start at 1");
  }
}

SignQuantizer::SignQuantizer(int k, double threshold)
    : k_(k), threshold_(threshold) {
  if (k < 1 || k > 16) {
    throw std::invalid_argument("SignQuantizer: k must lie in [1, 16]");
  }
  if (!std::isfinite(threshold)) {
    throw std::invalid_argument("SignQuantizer: threshold must be finite");
  }
}

std::vector<int> SignQuantizer::assigned_coordinates(long sensor_index,
                                                     int d) const {
  check_sensor(sensor_index);
  std::vector<int> coords(k_);
  for (int t = 0; t < k_; ++t) {
    coords[t] = static_cast<int>(((sensor_index - 1) * k_ + t) % d);
  }
  return coords;
}

int SignQuantizer::encode(long sensor_index, std::span<const double> x,
                          RandomStream& /*rng*/) const {
  const auto coords = assigned_coordinates(sensor_index,
                                           static_cast<int>(x.size()));
  int message = 1;
  for (int t = 0; t < k_; ++t) {
    if (x[coords[t]] >= threshold_) message += 1 << t;
  }
  return message;
}

double SignQuantizer::message_likelihood(const ParametricModel& model,
                                         long sensor_index,
                                         std::span<const double> theta,
                                         int message) const {
  check_message(message, alphabet_size());
  model.space().require_inside(theta);
  const auto coords = assigned_coordinates(sensor_index, model.dimension());
  const int pattern = message - 1;
  double prob = 1.0;
  std::vector<int> seen(model.dimension(), -1);
  for (int t = 0; t < k_; ++t) {
    const int c = coords[t];
    const int bit = (pattern >> t) & 1;
    if (seen[c] >= 0) {
      // A repeated coordinate forces its bits to agree.
      if (seen[c] != bit) return 0.0;
      continue;
    }
    seen[c] = bit;
    const double F = model.coordinate_cdf(threshold_, theta[c]);
    prob *= bit ? (1.0 - F) : F;
  }
  return prob;
}

double SignQuantizer::message_score(const ParametricModel& model,
                                    long sensor_index,
                                    std::span<const double> theta, int message,
                                    int coord) const {
  check_message(message, alphabet_size());
  model.space().require_inside(theta);
  if (coord < 0 || coord >= model.dimension()) {
    throw std::invalid_argument("message_score: bad coordinate");
  }
  if (!(message_likelihood(model, sensor_index, theta, message) > 0.0)) {
    throw std::domain_error("message_score: message has zero probability");
  }
  const auto coords = assigned_coordinates(sensor_index, model.dimension());
  const int pattern = message - 1;
  for (int t = 0; t < k_; ++t) {
    if (coords[t] != coord) continue;
    const int bit = (pattern >> t) & 1;
    const double F = model.coordinate_cdf(threshold_, theta[coord]);
    const double dF = model.coordinate_cdf_theta_derivative(threshold_,
                                                            theta[coord]);
    return bit ? -dF / (1.0 - F) : dF / F;
  }
  return 0.0;
}

GridQuantizer::GridQuantizer(int k, double half_width, double center)
    : k_(k), half_width_(half_width), center_(center) {
  if (k < 2 || k > 16) {
    throw std::invalid_argument(
        "GridQuantizer: k must lie in [2, 16] (k = 1 leaves no interior cells)");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("GridQuantizer: half width must be > 0");
  }
  if (!std::isfinite(center)) {
    throw std::invalid_argument("GridQuantizer: center must be finite");
  }
}

std::pair<double, double> GridQuantizer::cell_bounds(int message) const {
  check_message(message, alphabet_size());
  const double inf = std::numeric_limits<double>::infinity();
  const int interior = alphabet_size() - 2;
  const double width = 2.0 * half_width_ / interior;
  if (message == 1) return {-inf, center_ - half_width_};
  if (message == alphabet_size()) return {center_ + half_width_, inf};
  const double lo = center_ - half_width_ + (message - 2) * width;
  return {lo, lo + width};
}

std::vector<int> GridQuantizer::assigned_coordinates(long sensor_index,
                                                     int d) const {
  check_sensor(sensor_index);
  return {static_cast<int>((sensor_index - 1) % d)};
}

int GridQuantizer::encode(long sensor_index, std::span<const double> x,
                          RandomStream& /*rng*/) const {
  const int c = assigned_coordinates(sensor_index,
                                     static_cast<int>(x.size()))[0];
  const double z = x[c] - center_;
  if (z < -half_width_) return 1;
  if (z >= half_width_) return alphabet_size();
  const int interior = alphabet_size() - 2;
  const double width = 2.0 * half_width_ / interior;
  int cell = 2 + static_cast<int>(std::floor((z + half_width_) / width));
  if (cell > alphabet_size()) cell = alphabet_size();
  return cell;
}

double GridQuantizer::message_likelihood(const ParametricModel& model,
                                         long sensor_index,
                                         std::span<const double> theta,
                                         int message) const {
  model.space().require_inside(theta);
  const int c = assigned_coordinates(sensor_index, model.dimension())[0];
  const auto [lo, hi] = cell_bounds(message);
  const double Fhi = std::isinf(hi) ? 1.0 : model.coordinate_cdf(hi, theta[c]);
  const double Flo = std::isinf(lo) ? 0.0 : model.coordinate_cdf(lo, theta[c]);
  const double mass = Fhi - Flo;
  return mass > 0.0 ? mass : 0.0;
}

double GridQuantizer::message_score(const ParametricModel& model,
                                    long sensor_index,
                                    std::span<const double> theta, int message,
                                    int coord) const {
  model.space().require_inside(theta);
  if (coord < 0 || coord >= model.dimension()) {
    throw std::invalid_argument("message_score: bad coordinate");
  }
  const int c = assigned_coordinates(sensor_index, model.dimension())[0];
  if (c != coord) {
    check_message(message, alphabet_size());
    return 0.0;
  }
  const double mass = message_likelihood(model, sensor_index, theta, message);
  if (!(mass > 0.0)) {
    throw std::domain_error("message_score: message has zero probability");
  }
  const auto [lo, hi] = cell_bounds(message);
  const double dhi =
      std::isinf(hi) ? 0.0 : model.coordinate_cdf_theta_derivative(hi, theta[c]);
  const double dlo =
      std::isinf(lo) ? 0.0 : model.coordinate_cdf_theta_derivative(lo, theta[c]);
  return (dhi - dlo) / mass;
}

}  // namespace qdest
