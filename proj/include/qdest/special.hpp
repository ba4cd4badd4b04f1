#pragma once

namespace qdest {

// Standard normal density, CDF, and inverse CDF.
double normal_pdf(double x);
double normal_cdf(double x);

// Wichura's AS241 (PPND16) rational approximation, accurate to ~1e-15.
// Requires p in (0, 1); throws std::domain_error otherwise.
double normal_quantile(double p);

// Lanczos approximation (g = 7, 9 terms), relative error ~1e-13 for x > 0.
double log_gamma(double x);
double gamma_fn(double x);

// Euler Beta for u, v > 0.
double beta_fn(double u, double v);

}  // namespace qdest
