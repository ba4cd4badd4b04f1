#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qdest/rng.hpp"

namespace qdest {

// Hypercube [-B, B]^d.
struct ParameterSpace {
  int d = 1;
  double B = 1.0;

  ParameterSpace(int d_, double B_);
  bool contains(std::span<const double> theta) const;
  void require_inside(std::span<const double> theta) const;
};

enum class Regime { Low, High };

// Loss exponent p with its conjugate q = p / (p - 1).  Low regime covers
// 1 < p < 2, high regime p >= 2.
struct LossOrder {
  double p;
  double q;
  Regime regime;
  bool orlicz_low_valid;  // the low-regime single-shot bound needs p > 3/2

  static LossOrder of(double p);
};

// A scalar distribution in one of three concrete representations, consumed
// by the Orlicz-norm solver.  `key` enables memoization: laws with equal
// keys are interchangeable; an empty key disables caching.
struct ScalarLaw {
  enum class Kind { Density, Atoms, Samples };
  Kind kind = Kind::Density;
  std::function<double(double)> pdf;  // Density: supported on [lo, hi]
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> atom_values;  // Atoms
  std::vector<double> atom_probs;
  std::vector<double> samples;  // Samples
  std::string key;

  static ScalarLaw density(std::function<double(double)> pdf, double lo,
                           double hi, std::string key = {});
  static ScalarLaw atoms(std::vector<double> values, std::vector<double> probs,
                         std::string key = {});
  static ScalarLaw from_samples(std::vector<double> samples);
};

// Product family over [-B, B]^d whose coordinates are independent with a
// common one-dimensional law indexed by the coordinate parameter.
class ParametricModel {
 public:
  explicit ParametricModel(ParameterSpace space) : space_(space) {}
  virtual ~ParametricModel() = default;

  const ParameterSpace& space() const { return space_; }
  int dimension() const { return space_.d; }

  virtual std::string family_name() const = 0;
  virtual double scale() const = 0;
  virtual bool location_family() const { return false; }

  virtual double coordinate_density(double x, double theta_c) const = 0;
  virtual double coordinate_cdf(double x, double theta_c) const = 0;
  virtual double coordinate_quantile(double u, double theta_c) const = 0;
  virtual double coordinate_score(double x, double theta_c) const = 0;

  // d/dtheta of the coordinate CDF at fixed x; central difference fallback.
  virtual double coordinate_cdf_theta_derivative(double x,
                                                 double theta_c) const;

  // Halfwidth around the location beyond which coordinate integrands are
  // negligible at the tolerances used by the information-layer quadratures.
  virtual double integration_halfwidth() const = 0;

  // d/dtheta_i of E[X_i]; equals 1 for location families.
  virtual double mean_functional_derivative(std::span<const double> theta,
                                            int coord) const;

  // Law of <u, score(X, theta)> for a unit direction u.  The default draws
  // a fixed-size deterministic sample; subclasses supply analytic laws.
  virtual ScalarLaw score_projection_law(std::span<const double> theta,
                                         std::span<const double> u) const;

  double density(std::span<const double> x, std::span<const double> theta) const;
  double log_density(std::span<const double> x,
                     std::span<const double> theta) const;
  void score(std::span<const double> x, std::span<const double> theta,
             std::span<double> out) const;

  // Draws `count` vectors, appended row-major to `out` (count * d values).
  // count = 0 yields no draws and is not an error.
  void sample(std::span<const double> theta, long count, RandomStream& rng,
              std::vector<double>& out) const;

 private:
  ParameterSpace space_;
};

class GaussianLocation : public ParametricModel {
 public:
  GaussianLocation(double sigma, ParameterSpace space);

  std::string family_name() const override { return "gaussian"; }
  double scale() const override { return sigma_; }
  bool location_family() const override { return true; }

  double coordinate_density(double x, double theta_c) const override;
  double coordinate_cdf(double x, double theta_c) const override;
  double coordinate_quantile(double u, double theta_c) const override;
  double coordinate_score(double x, double theta_c) const override;
  double coordinate_cdf_theta_derivative(double x, double theta_c) const override;
  double integration_halfwidth() const override { return 12.0 * sigma_; }
  ScalarLaw score_projection_law(std::span<const double> theta,
                                 std::span<const double> u) const override;

 private:
  double sigma_;
};

class LaplaceLocation : public ParametricModel {
 public:
  LaplaceLocation(double b, ParameterSpace space);

  std::string family_name() const override { return "laplace"; }
  double scale() const override { return b_; }
  bool location_family() const override { return true; }

  double coordinate_density(double x, double theta_c) const override;
  double coordinate_cdf(double x, double theta_c) const override;
  double coordinate_quantile(double u, double theta_c) const override;
  double coordinate_score(double x, double theta_c) const override;
  double coordinate_cdf_theta_derivative(double x, double theta_c) const override;
  double integration_halfwidth() const override { return 40.0 * b_; }
  ScalarLaw score_projection_law(std::span<const double> theta,
                                 std::span<const double> u) const override;

 private:
  double b_;
};

// Factorized prior on [-B, B]^d with identical coordinate marginals that
// vanish on the boundary.  Sampling inverts a tabulated CDF (4096 segments,
// linear interpolation).
class Prior {
 public:
  explicit Prior(ParameterSpace space) : space_(space) {}
  virtual ~Prior() = default;

  const ParameterSpace& space() const { return space_; }
  virtual std::string name() const = 0;

  virtual double coordinate_density(double t) const = 0;
  // Throws std::domain_error on the boundary, where the score diverges.
  virtual double coordinate_score(double t) const = 0;
  virtual double coordinate_cdf(double t) const;
  virtual bool has_closed_form_omega() const { return false; }

  double log_density(std::span<const double> theta) const;
  void score(std::span<const double> theta, std::span<double> out) const;
  void sample(RandomStream& rng, std::span<double> out) const;

 protected:
  void build_table();

 private:
  ParameterSpace space_;
  std::vector<double> table_theta_;
  std::vector<double> table_cdf_;
};

// Density proportional to cos^2(pi t / (2B)) per coordinate.
class RaisedCosinePrior : public Prior {
 public:
  explicit RaisedCosinePrior(ParameterSpace space);

  std::string name() const override { return "raised_cosine"; }
  double coordinate_density(double t) const override;
  double coordinate_score(double t) const override;
  double coordinate_cdf(double t) const override;
  bool has_closed_form_omega() const override { return true; }
};

// Prior built from a user-supplied coordinate density; the score defaults
// to a central difference of the log density (step 1e-6).
class FunctionPrior : public Prior {
 public:
  FunctionPrior(ParameterSpace space, std::function<double(double)> density,
                std::function<double(double)> score = nullptr,
                std::string name = "custom");

  std::string name() const override { return name_; }
  double coordinate_density(double t) const override;
  double coordinate_score(double t) const override;

 private:
  std::function<double(double)> density_;
  std::function<double(double)> score_;
  std::string name_;
};

}  // namespace qdest
