#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lrdq/coefficients.hpp"
#include "lrdq/grid.hpp"
#include "lrdq/marginals.hpp"
#include "lrdq/path.hpp"

namespace lrdq {

// Empirical distribution function F_n(x) = n^{-1} #{X_i <= x} and the
// left-continuous sample quantile Q_n(y) = X_{ceil(ny):n}, both evaluated
// against a pre-sorted copy of the sample.
struct EmpiricalCdf {
  explicit EmpiricalCdf(const Eigen::VectorXd& x);

  double operator()(double x) const;       // right-continuous F_n
  double quantile(double y) const;         // y in (0,1]; y <= 0 is a domain error
  const Eigen::VectorXd& sorted() const { return sorted_; }
  std::int64_t n() const { return sorted_.size(); }

 private:
  Eigen::VectorXd sorted_;
};

double empirical_cdf(const LrdPath& path, double x);
double sample_quantile(const LrdPath& path, double y);

// U_i = F(X_i), the marginal probability integral transform of the path.
Eigen::VectorXd uniform_transform(const LrdPath& path, const MarginalModel& marginal);

enum class ProcessId {
  alpha_n,      // uniform empirical process
  u_n,          // uniform quantile process
  q_n,          // general quantile process
  beta_n_at_Q,  // general empirical process evaluated along Q(y)
  bk_general,   // R_n   = alpha_n - f(Q) q_n
  bk_uniform,   // R_n~  = alpha_n - u_n
  v_tilde_np,   // reduction target: -f(Q) Y_{n,1} [+ f'(Q) Y_{n,2} when p = 2]
};

struct ProcessSample {
  YGrid grid;
  Eigen::VectorXd values;
  ProcessId id = ProcessId::alpha_n;
  std::int64_t n = 0;
  double normalizer = 0.0;  // sigma_{n,1} used for the normalized processes
  int p = 1;                // expansion order (relevant for v_tilde_np)
};

// Evaluate one of the normalized processes on the grid.  sigma_n1 must be the
// exact p = 1 standard deviation of the partial sums; the asymptotic form is
// never accepted here.  For v_tilde_np the stored values are the raw
// expansion V~_{n,p}(y) (the caller applies whichever normalization the
// statement under study uses).
ProcessSample build_process(const LrdPath& path, const MarginalModel& marginal,
                            const YGrid& grid, ProcessId id, int p, double sigma_n1);

struct WeightContext {
  double beta = 0.7;
  double gamma = 1.0;
  double mu = 0.05;
  ConditionFlags flags;
  // When psi_1 guards a p-th order reduction statement, it is redefined to be
  // identically 1 as soon as A(p) holds; 0 keeps the base definition.
  int reduction_p = 0;
};

// The four weight families psi_1..psi_4.  Each is a case analysis on beta,
// the density-quantile tail exponent gamma and the smoothness flags; see the
// selector-by-selector comments in the implementation.
double weight_psi(int which, double y, const WeightContext& ctx);

struct RateConstants {
  double a_n = 0.0;
  double b_n = 0.0;
  double c_n = 0.0;
  double d_np = 0.0;
  double b_np = 0.0;
  double delta_n = 0.0;
  int d_branch = 0;  // +1 if (p+1)(2*beta-1) > 1, -1 if < 1
};

// Almost-sure rate constants (natural logs throughout; loglog n is read as
// log(log(max(n,16))) so small n stay positive).
RateConstants rate_constants(std::int64_t n, double beta, const SlowlyVarying& L0, int p);

// c(beta,p) with c^2 = I(beta) / ((1-beta)(3-2*beta)),
// I(beta) = \int_0^infty x^{-beta} (1+x)^{-beta} dx, computed by tanh-sinh
// quadrature after x = t/(1-t).  Throws if the quadrature fails to converge.
double c_beta_p(double beta, int p);

struct SupOptions {
  enum class Range { full, delta_trim, one_over_n } range = Range::full;
  double C0 = 1.0;       // trim to (C0*delta_n, 1-C0*delta_n)
  double delta_n = 0.0;  // required for delta_trim
};

// max over grid points in range of weight(y) * |value(y)|
double weighted_sup(const ProcessSample& sample,
                    const std::function<double(double)>& weight, const SupOptions& opts);

// Kolmogorov-Smirnov distances: sample against a reference CDF, and between
// the empirical CDFs of two samples.
double ks_distance(const Eigen::VectorXd& sample, const std::function<double(double)>& cdf);
double ks_distance_two_sample(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace lrdq
