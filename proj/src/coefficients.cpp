#include "lrdq/coefficients.hpp"

#include <cmath>

namespace lrdq {

Eigen::VectorXd make_coefficients(const CoefficientSpec& spec, std::uint64_t K) {
  spec.validate();
  Eigen::VectorXd c(static_cast<Eigen::Index>(K) + 1);
  for (std::uint64_t k = 0; k <= K; ++k)
    c[static_cast<Eigen::Index>(k)] = spec.raw_coefficient(k);
  if (spec.normalize_unit_variance) {
    double s2 = c.squaredNorm();
    if (s2 <= 0.0) throw std::runtime_error("make_coefficients: zero variance");
    c /= std::sqrt(s2);
  }
  return c;
}

namespace {

// Tail sum_{k>K} c_k^2 for the raw coefficients. Uses the integral
// comparison bound for constant L0; for log-power L0 a midpoint integral
// with the slowly varying factor included.
double tail_variance(const CoefficientSpec& spec, double K) {
  double b = 2.0 * spec.beta - 1.0;
  double s2 = spec.scale * spec.scale;
  if (spec.slowly_varying.kind == SlowlyVarying::Kind::Constant)
    return s2 * std::pow(K, -b) / b;
  // integral_{K}^{inf} x^{-2beta} L0^2(x) dx via substitution x = K e^u:
  // integrand K^{-b} e^{-b u} L0^2(K e^u); trapezoid on u with decay cutoff.
  double sum = 0.0;
  const double h = 0.05;
  for (double u = 0.5 * h;; u += h) {
    double x = K * std::exp(u);
    double l = spec.slowly_varying(x);
    double term = std::exp(-b * u) * l * l;
    sum += term;
    if (u > 5.0 && term < 1e-14 * sum) break;
    if (u > 400.0) break;
  }
  return s2 * std::pow(K, -b) * sum * h;
}

}  // namespace

double total_coefficient_variance(const CoefficientSpec& spec) {
  spec.validate();
  const std::uint64_t M = 1u << 16;
  double total = 0.0;
  for (std::uint64_t k = 0; k <= M; ++k) {
    double c = spec.raw_coefficient(k);
    total += c * c;
  }
  return total + tail_variance(spec, static_cast<double>(M) + 0.5);
}

std::uint64_t tail_truncation_index(const CoefficientSpec& spec) {
  spec.validate();
  double total = total_coefficient_variance(spec);
  double budget = spec.truncation_eps * total;

  // K = 0: tail is everything but c_0 (the integral bound is undefined there).
  double c0 = spec.raw_coefficient(0);
  if (total - c0 * c0 <= budget) return 0;

  if (spec.slowly_varying.kind == SlowlyVarying::Kind::Constant) {
    // Solve scale^2 K^{1-2beta}/(2beta-1) <= budget in closed form.
    double b = 2.0 * spec.beta - 1.0;
    double K = std::pow(b * budget / (spec.scale * spec.scale), -1.0 / b);
    if (K > 1e18) return static_cast<std::uint64_t>(1e18);
    std::uint64_t Ki = static_cast<std::uint64_t>(std::max(1.0, std::ceil(K)));
    while (Ki > 1 && tail_variance(spec, static_cast<double>(Ki - 1)) <= budget) --Ki;
    return Ki;
  }

  // Log-power L0: gallop + bisection on the numeric tail integral.
  std::uint64_t lo = 1, hi = 1;
  while (tail_variance(spec, static_cast<double>(hi)) > budget) {
    if (hi > (1ULL << 60)) return hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (tail_variance(spec, static_cast<double>(mid)) > budget) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace lrdq
