#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>

#include "lrdq/coefficients.hpp"
#include "lrdq/innovations.hpp"

namespace lrdq {

struct ConditionFlags {
  bool A1 = false, A2 = false, A3 = false;
  bool B = false;
  bool C1 = false, C2 = false, C3 = false;
  bool CsR1 = false, CsR2 = false, CsR3 = false, CsR4 = false;

  bool A(int p) const { return p == 1 ? A1 : (p == 2 ? A2 : A3); }
  bool C(int p) const { return p == 1 ? C1 : (p == 2 ? C2 : C3); }
  bool CsR_all() const { return CsR1 && CsR2 && CsR3 && CsR4; }
};

// Analytic marginal law: F, f, Q, the density-quantile function and its
// derivatives, tail exponents gamma1/gamma2 of f(Q(y)) ~ y^{gamma1} L(1/y),
// and the stored condition flags.
class MarginalModel {
 public:
  virtual ~MarginalModel() = default;

  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  virtual double quantile(double y) const = 0;
  virtual double pdf_deriv(double x) const = 0;    // f^{(1)}
  virtual double pdf_second(double x) const = 0;   // f^{(2)}

  double density_quantile(double y) const { return pdf(quantile(y)); }
  double fprime_at_q(double y) const { return pdf_deriv(quantile(y)); }
  double fsecond_at_q(double y) const { return pdf_second(quantile(y)); }

  // (f o Q)^{(1)}(y) = f'(Q(y)) / f(Q(y))
  double score_deriv(double y) const {
    double q = quantile(y);
    return pdf_deriv(q) / pdf(q);
  }
  // (f o Q)^{(2)}(y) = (f'' f - f'^2) / f^3 at Q(y)
  double second_deriv(double y) const {
    double q = quantile(y);
    double f = pdf(q), f1 = pdf_deriv(q), f2 = pdf_second(q);
    return (f2 * f - f1 * f1) / (f * f * f);
  }

  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  double gamma() const { return std::min(gamma1_, gamma2_); }
  double gamma0() const { return std::max(gamma1_, gamma2_); }
  const ConditionFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

 protected:
  double gamma1_ = 1.0, gamma2_ = 1.0;
  ConditionFlags flags_{};
  std::string name_ = "marginal";
};

using MarginalPtr = std::shared_ptr<const MarginalModel>;

MarginalPtr gaussian_marginal(double variance);
MarginalPtr logistic_marginal(double scale);
MarginalPtr smoothed_symmetric_pareto_marginal(double alpha, double smoothing_width);

// Variance of the smoothed symmetric Pareto law (closed form from the
// piecewise density); used to scale innovations to unit variance.
double smoothed_pareto_variance(double alpha, double smoothing_width);

// Empirical stand-in for the marginal of X when no closed form exists:
// interpolated F/Q tables from m independent stationary draws plus a
// binned kernel density estimate.
class OracleMarginal : public MarginalModel {
 public:
  OracleMarginal(Eigen::VectorXd sorted_sample);

  double cdf(double x) const override;
  double pdf(double x) const override;
  double quantile(double y) const override;
  double pdf_deriv(double x) const override;   // finite differences of the KDE
  double pdf_second(double x) const override;

  Eigen::Index sample_size() const { return sample_.size(); }

 private:
  Eigen::VectorXd sample_;  // sorted
  Eigen::VectorXd kde_grid_, kde_values_;
  double bandwidth_ = 0.0;
};

// Builds the oracle from m independent stationary draws, each obtained from
// its own length-(K+1) innovation window. Deterministic in (seed); block
// construction merges in fixed order.
std::shared_ptr<const OracleMarginal> oracle_marginal_from_simulation(
    const CoefficientSpec& spec, const InnovationSpec& innovation_spec, Eigen::Index m,
    std::uint64_t seed);

// Structured output of the condition checker.
struct ConditionReport {
  bool A = false, B = false, C = false;
  bool CsR1 = false, CsR2 = false, CsR3 = false, CsR4 = false;
  double gamma1 = 0, gamma2 = 0, gamma = 0, gamma0 = 0;
  // numeric sup of |f^{(r+1)}(Q)/f(Q)| (y(1-y))^{1/2} over the check grid,
  // for r = 0..p-1, and whether it kept growing on the tail refinement.
  double c_sup = 0.0;
  bool c_divergent = false;
};

ConditionReport condition_report(const MarginalModel& model, int p);

}  // namespace lrdq
