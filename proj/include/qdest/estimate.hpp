#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdest/models.hpp"
#include "qdest/quantize.hpp"

namespace qdest {

// One simulation cell: n sensors, k bits each, a trial count, the master
// seed, and the parameter grid the worst case is taken over.
struct SimulationPlan {
  long n = 0;
  int k = 1;
  long trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::vector<double>> theta_grid;

  void validate(const ParameterSpace& space) const;
};

// What a single trial produced: the encoded messages (sensor j at index
// j - 1) and the raw sample matrix (row-major n x d).
struct TrialData {
  std::span<const int> messages;
  std::span<const double> samples;
  long n = 0;
  int d = 0;
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::string name() const = 0;
  virtual bool needs_messages() const { return true; }
  virtual bool needs_samples() const { return false; }
  // Returns a point in [-B, B]^d; the quantizer pointer is null only for
  // estimators that do not read messages.
  virtual std::vector<double> estimate(const TrialData& trial,
                                       const Quantizer* quantizer,
                                       const ParametricModel& model) const = 0;
};

// Inverts the empirical frequency of one-bits through the centered
// coordinate CDF: theta_hat = threshold - G^{-1}(1 - phat), clipped to
// [-B, B].  Frequencies of exactly 0 or 1 map to the respective boundary;
// coordinates that received no bits map to 0.  Requires a SignQuantizer and
// a location family.
class SignInversionEstimator : public Estimator {
 public:
  std::string name() const override { return "sign_inversion"; }
  std::vector<double> estimate(const TrialData& trial, const Quantizer* quantizer,
                               const ParametricModel& model) const override;
};

// Coordinatewise maximum likelihood over the message cell masses, located
// by golden-section search on [-B, B] (tolerance 1e-8; cell masses of the
// shipped models are log-concave in theta, so the likelihood is unimodal).
// Requires every sensor to observe a single coordinate.
class QuantizedMlEstimator : public Estimator {
 public:
  std::string name() const override { return "quantized_ml"; }
  std::vector<double> estimate(const TrialData& trial, const Quantizer* quantizer,
                               const ParametricModel& model) const override;
};

// Coordinatewise mean of the raw samples, clipped to [-B, B]; bypasses
// quantization and serves as a calibration baseline.
class SampleMeanEstimator : public Estimator {
 public:
  std::string name() const override { return "sample_mean"; }
  bool needs_messages() const override { return false; }
  bool needs_samples() const override { return true; }
  std::vector<double> estimate(const TrialData& trial, const Quantizer* quantizer,
                               const ParametricModel& model) const override;
};

}  // namespace qdest
