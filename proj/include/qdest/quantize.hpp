#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdest/models.hpp"

namespace qdest {

// A k-bit quantizer applied independently by each sensor.  Messages are
// integers in [1, 2^k].  Coordinate assignment depends only on the sensor
// index, so likelihoods and scores are available in closed form through the
// model's coordinate CDF.
class Quantizer {
 public:
  virtual ~Quantizer() = default;

  virtual int bits() const = 0;
  virtual std::string name() const = 0;
  int alphabet_size() const { return 1 << bits(); }

  // 0-based coordinates observed by this sensor, one per bit position for
  // sign quantizers, a single entry for grid quantizers.
  virtual std::vector<int> assigned_coordinates(long sensor_index,
                                                int d) const = 0;

  // Sensors are numbered from 1.  The stream parameter exists so that
  // randomized quantizers fit the same interface; the shipped quantizers
  // are deterministic and do not draw from it.
  virtual int encode(long sensor_index, std::span<const double> x,
                     RandomStream& rng) const = 0;

  virtual double message_likelihood(const ParametricModel& model,
                                    long sensor_index,
                                    std::span<const double> theta,
                                    int message) const = 0;

  // d/dtheta_coord of log p(message | theta).  Zero for coordinates the
  // sensor does not observe; throws std::domain_error when the message has
  // zero probability at theta.
  virtual double message_score(const ParametricModel& model, long sensor_index,
                               std::span<const double> theta, int message,
                               int coord) const = 0;

 protected:
  static void check_message(int message, int alphabet);
  static void check_sensor(long sensor_index);
};

// One threshold comparison per bit; bit t of sensor j reports
// 1{x_c >= threshold} for coordinate c = ((j - 1) k + t) mod d.
class SignQuantizer : public Quantizer {
 public:
  explicit SignQuantizer(int k, double threshold = 0.0);

  int bits() const override { return k_; }
  std::string name() const override { return "sign"; }
  double threshold() const { return threshold_; }

  std::vector<int> assigned_coordinates(long sensor_index, int d) const override;
  int encode(long sensor_index, std::span<const double> x,
             RandomStream& rng) const override;
  double message_likelihood(const ParametricModel& model, long sensor_index,
                            std::span<const double> theta,
                            int message) const override;
  double message_score(const ParametricModel& model, long sensor_index,
                       std::span<const double> theta, int message,
                       int coord) const override;

 private:
  int k_;
  double threshold_;
};

// Uniform partition of [center - L, center + L) into 2^k - 2 cells plus two
// overflow cells; sensor j observes coordinate (j - 1) mod d.  Requires
// k >= 2 so that the interior is nonempty.
class GridQuantizer : public Quantizer {
 public:
  GridQuantizer(int k, double half_width, double center = 0.0);

  int bits() const override { return k_; }
  std::string name() const override { return "grid"; }
  double half_width() const { return half_width_; }
  double center() const { return center_; }

  // [lower, upper) of the cell in x coordinates; overflow cells extend to
  // -+infinity.
  std::pair<double, double> cell_bounds(int message) const;

  std::vector<int> assigned_coordinates(long sensor_index, int d) const override;
  int encode(long sensor_index, std::span<const double> x,
             RandomStream& rng) const override;
  double message_likelihood(const ParametricModel& model, long sensor_index,
                            std::span<const double> theta,
                            int message) const override;
  double message_score(const ParametricModel& model, long sensor_index,
                       std::span<const double> theta, int message,
                       int coord) const override;

 private:
  int k_;
  double half_width_;
  double center_;
};

}  // namespace qdest
