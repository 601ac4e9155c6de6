#include "lrdq/second_order.hpp"

#include <cmath>
#include <stdexcept>

#include "lrdq/convolution.hpp"
#include "lrdq/special.hpp"

namespace lrdq {

SecondOrder::SecondOrder(const CoefficientSpec& spec, double sigma_eps2,
                         std::uint64_t direct_limit)
    : spec_(spec), sigma_eps2_(sigma_eps2) {
  spec_.validate();
  K_ = tail_truncation_index(spec_);
  std::uint64_t M = std::min(K_, direct_limit);

  CoefficientSpec raw = spec_;
  raw.normalize_unit_variance = false;
  coeffs_ = make_coefficients(raw, M);

  if (spec_.normalize_unit_variance) {
    // Normalize against the variance of the full truncated array 0..K.
    double total = coeffs_.squaredNorm();
    if (K_ > M) {
      norm2_ = 1.0;  // tail_cross_sum uses raw coefficients scaled by norm2_
      total += tail_cross_sum(0);
    }
    norm2_ = 1.0 / total;
    coeffs_ *= std::sqrt(norm2_);
  }
  build_autocorrelation();
}

SecondOrder::SecondOrder(const CoefficientSpec& spec, Eigen::VectorXd coeffs, double sigma_eps2)
    : spec_(spec), coeffs_(std::move(coeffs)), sigma_eps2_(sigma_eps2) {
  K_ = static_cast<std::uint64_t>(coeffs_.size()) - 1;
  norm2_ = 1.0;  // coefficients are taken exactly as realized
  build_autocorrelation();
}

void SecondOrder::build_autocorrelation() {
  const Eigen::Index M = coeffs_.size() - 1;
  Eigen::VectorXd conv = fft_convolve(coeffs_, coeffs_.reverse());
  autocorr_ = conv.segment(M, M + 1);  // lag k at index M + k
  autocorr_[0] = coeffs_.squaredNorm();  // exact, avoids FFT rounding at lag 0
}

double SecondOrder::tail_cross_sum(std::uint64_t k) const {
  const std::uint64_t M = static_cast<std::uint64_t>(coeffs_.size()) - 1;
  if (K_ <= M) return 0.0;
  // sum_{m=M-k+1}^{K-k} c_m c_{m+k}, midpoint integral comparison on [A,B].
  double A = static_cast<double>(M) - static_cast<double>(k) + 0.5;
  double B = static_cast<double>(K_) - static_cast<double>(k) + 0.5;
  if (B <= A) return 0.0;
  CoefficientSpec raw = spec_;
  raw.normalize_unit_variance = false;
  auto g = [&](double u) {
    // m = A e^u, integrand g(m) m
    double m = A * std::exp(u);
    double cm = raw.scale * std::pow(m, -raw.beta) * raw.slowly_varying(m);
    double cmk = raw.scale * std::pow(m + double(k), -raw.beta) * raw.slowly_varying(m + double(k));
    return cm * cmk * m;
  };
  double L = std::log(B / A);
  double integral = adaptive_simpson(g, 0.0, L, 1e-9 * std::pow(A, 1.0 - 2.0 * raw.beta), 24);
  return integral * norm2_;
}

double SecondOrder::rho(std::uint64_t k) const {
  if (k > K_) return 0.0;
  if (k < rho_cache_.size()) return rho_cache_[k];
  const std::uint64_t M = static_cast<std::uint64_t>(coeffs_.size()) - 1;
  double direct = k <= M ? autocorr_[static_cast<Eigen::Index>(k)] : 0.0;
  double value = sigma_eps2_ * (direct + tail_cross_sum(k));
  if (k == rho_cache_.size()) rho_cache_.push_back(value);
  return value;
}

double SecondOrder::sigma2_n1(Eigen::Index n) const {
  if (n < 1) throw std::invalid_argument("sigma2_n1: n must be >= 1");
  double acc = double(n) * rho(0);
  for (Eigen::Index k = 1; k < n; ++k) acc += 2.0 * double(n - k) * rho(k);
  return acc;
}

double sigma_np(const CoefficientSpec& spec, Eigen::Index n, int p, SigmaMode mode) {
  spec.validate();
  if (p < 1) throw std::invalid_argument("sigma_np: p must be >= 1");
  double pmax = 1.0 / (2.0 * spec.beta - 1.0);
  if (mode == SigmaMode::Exact) {
    if (p != 1) throw std::invalid_argument("sigma_np: exact mode supports only p = 1");
    return SecondOrder(spec).sigma_n1(n);
  }
  if (!(double(p) < pmax))
    throw std::domain_error("sigma_np: asymptotic variance requires p < (2beta-1)^{-1}");
  double L0 = spec.slowly_varying(double(n));
  return std::pow(double(n), 1.0 - double(p) * (spec.beta - 0.5)) * std::pow(L0, double(p));
}

}  // namespace lrdq
