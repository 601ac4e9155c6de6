#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace lrdq {

// Standard normal density, distribution and quantile functions.
inline double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

// Inverse of normal_cdf, accurate to full double precision
// (rational approximation plus one Halley refinement step).
double normal_quantile(double y);

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;  // estimated
  bool converged = false;
};

// Tanh-sinh quadrature of f over (0,1). The integrand receives both t and
// 1-t so endpoint-singular factors can be evaluated without cancellation.
QuadratureResult tanh_sinh_01(const std::function<double(double, double)>& f,
                              double rel_tol = 1e-12, int max_level = 12);

// Adaptive Simpson on a finite interval for smooth integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 30);

}  // namespace lrdq
