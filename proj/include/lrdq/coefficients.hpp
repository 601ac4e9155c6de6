#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace lrdq {

// Slowly varying factor L0 in the regularly varying coefficients
// c_k = scale * k^{-beta} * L0(k).
struct SlowlyVarying {
  enum class Kind { Constant, LogPower };
  Kind kind = Kind::Constant;
  double log_exponent = 0.0;  // a in L0(k) = (log(k+e))^a

  double operator()(double k) const {
    if (kind == Kind::Constant) return 1.0;
    return std::pow(std::log(k + 2.718281828459045235), log_exponent);
  }
  static SlowlyVarying constant() { return {}; }
  static SlowlyVarying log_power(double a) { return {Kind::LogPower, a}; }
};

struct CoefficientSpec {
  double beta = 0.7;                 // regular variation index, in (1/2, 1)
  double scale = 1.0;
  SlowlyVarying slowly_varying{};
  bool normalize_unit_variance = false;
  double truncation_eps = 1e-4;      // relative tail-variance tolerance

  void validate() const {
    if (!(beta > 0.5 && beta < 1.0))
      throw std::invalid_argument("CoefficientSpec: beta must lie in (1/2, 1)");
    if (!(truncation_eps > 0.0))
      throw std::invalid_argument("CoefficientSpec: truncation_eps must be positive");
    if (!(scale > 0.0)) throw std::invalid_argument("CoefficientSpec: scale must be positive");
  }

  // Raw (un-normalized) coefficient; c_0 takes the k=1 value of L0.
  double raw_coefficient(std::uint64_t k) const {
    if (k == 0) return scale * slowly_varying(1.0);
    double kd = static_cast<double>(k);
    return scale * std::pow(kd, -beta) * slowly_varying(kd);
  }
};

// Coefficients c_0..c_K. With normalize_unit_variance the whole array is
// rescaled so that sum of squares over 0..K equals 1.
Eigen::VectorXd make_coefficients(const CoefficientSpec& spec, std::uint64_t K);

// Smallest K with tail variance sum_{k>K} c_k^2 <= eps * total variance.
// For huge K (slow decay, tight eps) the tail is bounded by the
// integral comparison K^{1-2beta}/(2beta-1); the returned index may then be
// far beyond anything that can be materialized.
std::uint64_t tail_truncation_index(const CoefficientSpec& spec);

// Total variance sum_{k>=0} c_k^2 of the raw (un-normalized) coefficients,
// evaluated by direct summation plus an integral-comparison remainder.
double total_coefficient_variance(const CoefficientSpec& spec);

}  // namespace lrdq
