#include "qdest/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qdest/quadrature.hpp"
#include "qdest/special.hpp"

namespace qdest {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ParameterSpace::ParameterSpace(int d_, double B_) : d(d_), B(B_) {
  if (d < 1) throw std::invalid_argument("ParameterSpace: d must be >= 1");
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw std::invalid_argument("ParameterSpace: B must be finite and > 0");
  }
}

bool ParameterSpace::contains(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != d) return false;
  return std::all_of(theta.begin(), theta.end(), [this](double t) {
    return std::isfinite(t) && std::fabs(t) <= B;
  });
}

void ParameterSpace::require_inside(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != d) {
    throw std::invalid_argument("theta has wrong dimension");
  }
  if (!all_finite(theta)) {
    throw std::invalid_argument("theta has non-finite entries");
  }
  if (!contains(theta)) {
    throw std::domain_error("theta lies outside [-B, B]^d");
  }
}

LossOrder LossOrder::of(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::domain_error("LossOrder: p must be finite and > 1");
  }
  LossOrder o;
  o.p = p;
  o.q = p / (p - 1.0);
  o.regime = (p < 2.0) ? Regime::Low : Regime::High;
  o.orlicz_low_valid = (p > 1.5 && p < 2.0);
  return o;
}

ScalarLaw ScalarLaw::density(std::function<double(double)> pdf, double lo,
                             double hi, std::string key) {
  ScalarLaw law;
  law.kind = Kind::Density;
  law.pdf = std::move(pdf);
  law.lo = lo;
  law.hi = hi;
  law.key = std::move(key);
  return law;
}

ScalarLaw ScalarLaw::atoms(std::vector<double> values,
                           std::vector<double> probs, std::string key) {
  if (values.size() != probs.size()) {
    throw std::invalid_argument("ScalarLaw::atoms: size mismatch");
  }
  double total = 0.0;
  for (double q : probs) {
    if (!(q >= 0.0)) {
      throw std::invalid_argument("ScalarLaw::atoms: negative probability");
    }
    total += q;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("ScalarLaw::atoms: probabilities must sum to 1");
  }
  ScalarLaw law;
  law.kind = Kind::Atoms;
  law.atom_values = std::move(values);
  law.atom_probs = std::move(probs);
  law.key = std::move(key);
  return law;
}

ScalarLaw ScalarLaw::from_samples(std::vector<double> samples) {
  ScalarLaw law;
  law.kind = Kind::Samples;
  law.samples = std::move(samples);
  return law;
}

double ParametricModel::coordinate_cdf_theta_derivative(double x,
                                                        double theta_c) const {
  const double h = 1e-6;
  return (coordinate_cdf(x, theta_c + h) - coordinate_cdf(x, theta_c - h)) /
         (2.0 * h);
}

double ParametricModel::mean_functional_derivative(
    std::span<const double> theta, int coord) const {
  space().require_inside(theta);
  if (coord < 0 || coord >= dimension()) {
    throw std::invalid_argument("mean_functional_derivative: bad coordinate");
  }
  if (location_family()) return 1.0;
  throw std::logic_error(
      "mean_functional_derivative: no default for non-location families");
}

ScalarLaw ParametricModel::score_projection_law(std::span<const double> theta,
                                                std::span<const double> u) const {
  space().require_inside(theta);
  const int d = dimension();
  const long count = 200000;
  RandomStream rng(derive_seed(0x5C03EFA11ULL, 1));
  std::vector<double> z(count);
  for (long s = 0; s < count; ++s) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
      const double x = coordinate_quantile(rng.uniform01(), theta[c]);
      acc += u[c] * coordinate_score(x, theta[c]);
    }
    z[s] = acc;
  }
  return ScalarLaw::from_samples(std::move(z));
}

double ParametricModel::density(std::span<const double> x,
                                std::span<const double> theta) const {
  space().require_inside(theta);
  if (static_cast<int>(x.size()) != dimension() || !all_finite(x)) {
    throw std::invalid_argument("density: x must be finite with dimension d");
  }
  double prod = 1.0;
  for (int c = 0; c < dimension(); ++c) {
    prod *= coordinate_density(x[c], theta[c]);
  }
  return prod;
}

double ParametricModel::log_density(std::span<const double> x,
                                    std::span<const double> theta) const {
  space().require_inside(theta);
  if (static_cast<int>(x.size()) != dimension() || !all_finite(x)) {
    throw std::invalid_argument("log_density: x must be finite with dimension d");
  }
  double acc = 0.0;
  for (int c = 0; c < dimension(); ++c) {
    acc += std::log(coordinate_density(x[c], theta[c]));
  }
  return acc;
}

void ParametricModel::score(std::span<const double> x,
                            std::span<const double> theta,
                            std::span<double> out) const {
  space().require_inside(theta);
  if (static_cast<int>(x.size()) != dimension() || !all_finite(x)) {
    throw std::invalid_argument("score: x must be finite with dimension d");
  }
  if (out.size() != x.size()) {
    throw std::invalid_argument("score: output span has wrong size");
  }
  for (int c = 0; c < dimension(); ++c) {
    out[c] = coordinate_score(x[c], theta[c]);
  }
}

void ParametricModel::sample(std::span<const double> theta, long count,
                             RandomStream& rng, std::vector<double>& out) const {
  space().require_inside(theta);
  if (count < 0) throw std::invalid_argument("sample: count must be >= 0");
  const int d = dimension();
  out.reserve(out.size() + static_cast<std::size_t>(count) * d);
  for (long s = 0; s < count; ++s) {
    for (int c = 0; c < d; ++c) {
      out.push_back(coordinate_quantile(rng.uniform01(), theta[c]));
    }
  }
}

GaussianLocation::GaussianLocation(double sigma, ParameterSpace space)
    : ParametricModel(space), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GaussianLocation: sigma must be > 0");
  }
}

double GaussianLocation::coordinate_density(double x, double theta_c) const {
  return normal_pdf((x - theta_c) / sigma_) / sigma_;
}

double GaussianLocation::coordinate_cdf(double x, double theta_c) const {
  return normal_cdf((x - theta_c) / sigma_);
}

double GaussianLocation::coordinate_quantile(double u, double theta_c) const {
  return theta_c + sigma_ * normal_quantile(u);
}

double GaussianLocation::coordinate_score(double x, double theta_c) const {
  return (x - theta_c) / (sigma_ * sigma_);
}

double GaussianLocation::coordinate_cdf_theta_derivative(double x,
                                                         double theta_c) const {
  return -coordinate_density(x, theta_c);
}

ScalarLaw GaussianLocation::score_projection_law(
    std::span<const double> theta, std::span<const double> /*u*/) const {
  space().require_inside(theta);
  // <u, score> ~ N(0, 1/sigma^2) for every unit direction and every theta.
  const double sd = 1.0 / sigma_;
  const double s = sigma_;
  return ScalarLaw::density(
      [s](double z) { return normal_pdf(z * s) * s; }, -16.0 * sd, 16.0 * sd,
      "gauss_projection:" + fmt17(sigma_));
}

LaplaceLocation::LaplaceLocation(double b, ParameterSpace space)
    : ParametricModel(space), b_(b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("LaplaceLocation: b must be > 0");
  }
}

double LaplaceLocation::coordinate_density(double x, double theta_c) const {
  return std::exp(-std::fabs(x - theta_c) / b_) / (2.0 * b_);
}

double LaplaceLocation::coordinate_cdf(double x, double theta_c) const {
  const double z = (x - theta_c) / b_;
  return (z < 0.0) ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double LaplaceLocation::coordinate_quantile(double u, double theta_c) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("coordinate_quantile: u must lie in (0, 1)");
  }
  return (u < 0.5) ? theta_c + b_ * std::log(2.0 * u)
                   : theta_c - b_ * std::log(2.0 * (1.0 - u));
}

double LaplaceLocation::coordinate_score(double x, double theta_c) const {
  const double z = x - theta_c;
  if (z > 0.0) return 1.0 / b_;
  if (z < 0.0) return -1.0 / b_;
  return 0.0;
}

double LaplaceLocation::coordinate_cdf_theta_derivative(double x,
                                                        double theta_c) const {
  return -coordinate_density(x, theta_c);
}

ScalarLaw LaplaceLocation::score_projection_law(std::span<const double> theta,
                                                std::span<const double> u) const {
  space().require_inside(theta);
  const int d = dimension();
  if (d > 16) return ParametricModel::score_projection_law(theta, u);
  // Coordinate scores are independent signs scaled by 1/b, so the projection
  // is a uniform mixture over all 2^d sign patterns of u.
  const int patterns = 1 << d;
  std::vector<double> values(patterns);
  std::vector<double> probs(patterns, 1.0 / patterns);
  std::string key = "laplace_projection:" + fmt17(b_);
  for (int c = 0; c < d; ++c) key += "," + fmt17(u[c]);
  for (int m = 0; m < patterns; ++m) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
      acc += ((m >> c) & 1 ? 1.0 : -1.0) * u[c] / b_;
    }
    values[m] = acc;
  }
  return ScalarLaw::atoms(std::move(values), std::move(probs), std::move(key));
}

double Prior::coordinate_cdf(double t) const {
  const double B = space_.B;
  if (t <= -B) return 0.0;
  if (t >= B) return 1.0;
  if (table_theta_.empty()) {
    throw std::logic_error("Prior: table not built before coordinate_cdf");
  }
  const auto it =
      std::upper_bound(table_theta_.begin(), table_theta_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - table_theta_.begin()) - 1;
  const double t0 = table_theta_[j], t1 = table_theta_[j + 1];
  const double f0 = table_cdf_[j], f1 = table_cdf_[j + 1];
  return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

void Prior::build_table() {
  const int segments = 4096;
  const double B = space_.B;
  table_theta_.resize(segments + 1);
  table_cdf_.resize(segments + 1);
  for (int j = 0; j <= segments; ++j) {
    table_theta_[j] = -B + 2.0 * B * j / segments;
  }
  table_cdf_[0] = 0.0;
  for (int j = 0; j < segments; ++j) {
    const auto seg = integrate([this](double t) { return coordinate_density(t); },
                               table_theta_[j], table_theta_[j + 1], 1e-14,
                               1e-12, 64);
    table_cdf_[j + 1] = table_cdf_[j] + seg.value;
  }
  const double total = table_cdf_[segments];
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("Prior: coordinate density does not normalize");
  }
  for (double& f : table_cdf_) f /= total;
}

double Prior::log_density(std::span<const double> theta) const {
  space_.require_inside(theta);
  double acc = 0.0;
  for (double t : theta) acc += std::log(coordinate_density(t));
  return acc;
}

void Prior::score(std::span<const double> theta, std::span<double> out) const {
  space_.require_inside(theta);
  if (out.size() != theta.size()) {
    throw std::invalid_argument("Prior::score: output span has wrong size");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = coordinate_score(theta[i]);
  }
}

void Prior::sample(RandomStream& rng, std::span<double> out) const {
  if (static_cast<int>(out.size()) != space_.d) {
    throw std::invalid_argument("Prior::sample: output span has wrong size");
  }
  for (double& t : out) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(table_cdf_.begin(), table_cdf_.end(), u);
    std::size_t j = static_cast<std::size_t>(it - table_cdf_.begin());
    if (j == 0) j = 1;
    if (j >= table_cdf_.size()) j = table_cdf_.size() - 1;
    const double f0 = table_cdf_[j - 1], f1 = table_cdf_[j];
    const double t0 = table_theta_[j - 1], t1 = table_theta_[j];
    t = (f1 > f0) ? t0 + (t1 - t0) * (u - f0) / (f1 - f0) : t0;
  }
}

RaisedCosinePrior::RaisedCosinePrior(ParameterSpace space) : Prior(space) {
  build_table();
}

double RaisedCosinePrior::coordinate_density(double t) const {
  const double B = space().B;
  if (std::fabs(t) > B) return 0.0;
  const double c = std::cos(M_PI * t / (2.0 * B));
  return c * c / B;
}

double RaisedCosinePrior::coordinate_score(double t) const {
  const double B = space().B;
  if (!(std::fabs(t) < B)) {
    throw std::domain_error("RaisedCosinePrior: score diverges on the boundary");
  }
  return -(M_PI / B) * std::tan(M_PI * t / (2.0 * B));
}

double RaisedCosinePrior::coordinate_cdf(double t) const {
  const double B = space().B;
  if (t <= -B) return 0.0;
  if (t >= B) return 1.0;
  return (t + (B / M_PI) * std::sin(M_PI * t / B) + B) / (2.0 * B);
}

FunctionPrior::FunctionPrior(ParameterSpace space,
                             std::function<double(double)> density,
                             std::function<double(double)> score,
                             std::string name)
    : Prior(space),
      density_(std::move(density)),
      score_(std::move(score)),
      name_(std::move(name)) {
  if (!density_) throw std::invalid_argument("FunctionPrior: density required");
  build_table();
}

double FunctionPrior::coordinate_density(double t) const {
  if (std::fabs(t) > space().B) return 0.0;
  return density_(t);
}

double FunctionPrior::coordinate_score(double t) const {
  const double B = space().B;
  if (!(std::fabs(t) < B)) {
    throw std::domain_error("FunctionPrior: score diverges on the boundary");
  }
  if (score_) return score_(t);
  const double h = std::min(1e-6, 0.5 * (B - std::fabs(t)));
  return (std::log(density_(t + h)) - std::log(density_(t - h))) / (2.0 * h);
}

}  // namespace qdest
