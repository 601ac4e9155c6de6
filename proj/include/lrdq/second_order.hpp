#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lrdq/coefficients.hpp"

namespace lrdq {

// Exact second-order quantities of the (possibly astronomically) truncated
// linear process. The coefficient prefix up to `direct_limit` is
// materialized; cross products beyond it are picked up by an
// Euler-Maclaurin-corrected integral, so rho_k is accurate even when the
// spec-driven truncation index K cannot be materialized.
class SecondOrder {
 public:
  // Spec-driven: K from tail_truncation_index(spec).
  explicit SecondOrder(const CoefficientSpec& spec, double sigma_eps2 = 1.0,
                       std::uint64_t direct_limit = 1u << 20);

  // Path-consistent: exact finite coefficient array as simulated.
  SecondOrder(const CoefficientSpec& spec, Eigen::VectorXd coeffs, double sigma_eps2 = 1.0);

  // rho_k = sigma_eps^2 sum_{m=0}^{K-k} c_m c_{m+k}
  double rho(std::uint64_t k) const;

  // exact Var(sum_{i<=n} X_i) = sum_{|k|<n} (n-|k|) rho_k
  double sigma2_n1(Eigen::Index n) const;
  double sigma_n1(Eigen::Index n) const { return std::sqrt(sigma2_n1(n)); }

  std::uint64_t truncation_index() const { return K_; }

 private:
  void build_autocorrelation();
  double tail_cross_sum(std::uint64_t k) const;  // sum over m in (M, K-k]

  CoefficientSpec spec_;
  Eigen::VectorXd coeffs_;       // c_0..c_M (normalized if requested)
  std::uint64_t K_ = 0;          // full truncation index (may exceed M)
  double sigma_eps2_ = 1.0;
  double norm2_ = 1.0;           // applied normalization factor squared
  Eigen::VectorXd autocorr_;     // lag sums over the materialized prefix
  mutable std::vector<double> rho_cache_;
};

// The paper's variance scale for Y_{n,p}. Exact mode is supported only for
// p = 1; asymptotic mode returns n^{1-p(beta-1/2)} L0^p(n) (constant
// unspecified in the source asymptotics).
enum class SigmaMode { Exact, Asymptotic };
double sigma_np(const CoefficientSpec& spec, Eigen::Index n, int p, SigmaMode mode);

}  // namespace lrdq
