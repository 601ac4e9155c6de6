#include "lrdq/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lrdq/grid.hpp"
#include "lrdq/rng.hpp"
#include "lrdq/special.hpp"

namespace lrdq {

namespace {

class GaussianMarginal final : public MarginalModel {
 public:
  explicit GaussianMarginal(double variance) : sigma_(std::sqrt(variance)) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_marginal: variance <= 0");
    name_ = "gaussian";
    gamma1_ = gamma2_ = 1.0;
    flags_.C1 = flags_.C2 = flags_.C3 = true;
    flags_.CsR1 = flags_.CsR2 = flags_.CsR3 = flags_.CsR4 = true;
    // score function -(f o Q)' = z is unbounded: (A(p)) and (B) fail.
  }
  double cdf(double x) const override { return normal_cdf(x / sigma_); }
  double pdf(double x) const override { return normal_pdf(x / sigma_) / sigma_; }
  double quantile(double y) const override { return sigma_ * normal_quantile(y); }
  double pdf_deriv(double x) const override {
    double z = x / sigma_;
    return -z * normal_pdf(z) / (sigma_ * sigma_);
  }
  double pdf_second(double x) const override {
    double z = x / sigma_;
    return (z * z - 1.0) * normal_pdf(z) / (sigma_ * sigma_ * sigma_);
  }

 private:
  double sigma_;
};

class LogisticMarginal final : public MarginalModel {
 public:
  explicit LogisticMarginal(double scale) : s_(scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("logistic_marginal: scale <= 0");
    name_ = "logistic";
    gamma1_ = gamma2_ = 1.0;
    flags_.A1 = flags_.A2 = flags_.A3 = true;
    flags_.B = true;
    flags_.C1 = flags_.C2 = flags_.C3 = true;
    flags_.CsR1 = flags_.CsR2 = flags_.CsR3 = flags_.CsR4 = true;
  }
  double cdf(double x) const override { return 1.0 / (1.0 + std::exp(-x / s_)); }
  double pdf(double x) const override {
    double F = cdf(x);
    return F * (1.0 - F) / s_;
  }
  double quantile(double y) const override { return s_ * (std::log(y) - std::log1p(-y)); }
  double pdf_deriv(double x) const override {
    double F = cdf(x);
    return F * (1.0 - F) * (1.0 - 2.0 * F) / (s_ * s_);
  }
  double pdf_second(double x) const override {
    double F = cdf(x);
    double f = F * (1.0 - F);
    return f * ((1.0 - 2.0 * F) * (1.0 - 2.0 * F) - 2.0 * f) / (s_ * s_ * s_);
  }

 private:
  double s_;
};

// Symmetric Pareto density alpha/(2|x|^{1+alpha}) outside |x| > s = 1 + w,
// bridged across [-s, s] by the even polynomial a0 + a2 x^2 + a4 x^4 that
// matches value and first two derivatives of the tail at |x| = s, then
// normalized to unit mass.
class SmoothedParetoMarginal final : public MarginalModel {
 public:
  SmoothedParetoMarginal(double alpha, double width) : alpha_(alpha), s_(1.0 + width) {
    if (!(alpha > 4.0))
      throw std::invalid_argument(
          "smoothed_symmetric_pareto_marginal: alpha must exceed 4 (fourth moments)");
    if (!(width > 0.0))
      throw std::invalid_argument("smoothed_symmetric_pareto_marginal: smoothing_width <= 0");
    name_ = "pareto";
    gamma1_ = gamma2_ = (1.0 + alpha) / alpha;
    flags_.A1 = flags_.A2 = flags_.A3 = true;
    flags_.B = true;
    flags_.C1 = flags_.C2 = flags_.C3 = true;
    flags_.CsR1 = flags_.CsR2 = flags_.CsR3 = flags_.CsR4 = true;

    // Tail value/derivatives at s of h(x) = (alpha/2) x^{-(1+alpha)}.
    double v = 0.5 * alpha_ * std::pow(s_, -(1.0 + alpha_));
    double d1 = -(1.0 + alpha_) * v / s_;
    double d2 = (1.0 + alpha_) * (2.0 + alpha_) * v / (s_ * s_);
    // a0 + a2 s^2 + a4 s^4 = v; 2 a2 s + 4 a4 s^3 = d1; 2 a2 + 12 a4 s^2 = d2.
    a4_ = (d2 - d1 / s_) / (8.0 * s_ * s_);
    a2_ = (d1 / s_ - 4.0 * a4_ * s_ * s_) / 2.0;
    a0_ = v - a2_ * s_ * s_ - a4_ * s_ * s_ * s_ * s_;
    if (bridge_unnorm(0.0) <= 0.0)
      throw std::invalid_argument("smoothed_symmetric_pareto_marginal: bridge dips below zero");

    // Mass: 2 * (int_0^s bridge + int_s^inf tail) with tail integral s^{-alpha}/2.
    double bridge_mass = a0_ * s_ + a2_ * s_ * s_ * s_ / 3.0 + a4_ * std::pow(s_, 5.0) / 5.0;
    norm_ = 1.0 / (2.0 * bridge_mass + std::pow(s_, -alpha_));
    // CDF value at -s (left tail mass).
    F_at_minus_s_ = norm_ * 0.5 * std::pow(s_, -alpha_);
  }

  double pdf(double x) const override {
    double ax = std::abs(x);
    if (ax <= s_) return norm_ * bridge_unnorm(ax);
    return norm_ * 0.5 * alpha_ * std::pow(ax, -(1.0 + alpha_));
  }
  double cdf(double x) const override {
    if (x < -s_) return norm_ * 0.5 * std::pow(-x, -alpha_);
    if (x > s_) return 1.0 - norm_ * 0.5 * std::pow(x, -alpha_);
    // integral of the bridge from -s to x = (odd polynomial) + half bridge mass
    double P = a0_ * x + a2_ * x * x * x / 3.0 + a4_ * std::pow(x, 5.0) / 5.0;
    double Ps = a0_ * s_ + a2_ * s_ * s_ * s_ / 3.0 + a4_ * std::pow(s_, 5.0) / 5.0;
    return F_at_minus_s_ + norm_ * (P + Ps);
  }
  double quantile(double y) const override {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("quantile: y outside (0,1)");
    if (y < F_at_minus_s_) return -std::pow(2.0 * y / norm_, -1.0 / alpha_);
    if (y > 1.0 - F_at_minus_s_) return std::pow(2.0 * (1.0 - y) / norm_, -1.0 / alpha_);
    // Newton with bisection fallback on the polynomial segment. The bracket
    // is tightened before the step so a converged x (which then sits exactly
    // on a bracket endpoint) is returned as-is, never clamped away.
    double lo = -s_, hi = s_, x = 0.0;
    for (int it = 0; it < 100; ++it) {
      double e = cdf(x) - y;
      if (e > 0.0) hi = x;
      else if (e < 0.0) lo = x;
      else return x;
      double xn = x - e / pdf(x);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(x))) return x;
      x = xn;
    }
    return x;
  }
  double pdf_deriv(double x) const override {
    double ax = std::abs(x), sgn = x < 0 ? -1.0 : 1.0;
    if (ax <= s_) return norm_ * sgn * (2.0 * a2_ * ax + 4.0 * a4_ * ax * ax * ax);
    return -norm_ * sgn * 0.5 * alpha_ * (1.0 + alpha_) * std::pow(ax, -(2.0 + alpha_));
  }
  double pdf_second(double x) const override {
    double ax = std::abs(x);
    if (ax <= s_) return norm_ * (2.0 * a2_ + 12.0 * a4_ * ax * ax);
    return norm_ * 0.5 * alpha_ * (1.0 + alpha_) * (2.0 + alpha_) * std::pow(ax, -(3.0 + alpha_));
  }

  double variance() const {
    // 2 * (int_0^s x^2 bridge + int_s^inf x^2 tail), tail needs alpha > 2.
    double bridge = a0_ * std::pow(s_, 3.0) / 3.0 + a2_ * std::pow(s_, 5.0) / 5.0 +
                    a4_ * std::pow(s_, 7.0) / 7.0;
    double tail = 0.5 * alpha_ / (alpha_ - 2.0) * std::pow(s_, 2.0 - alpha_);
    return norm_ * 2.0 * (bridge + tail);
  }

 private:
  double bridge_unnorm(double ax) const { return a0_ + a2_ * ax * ax + a4_ * ax * ax * ax * ax; }

  double alpha_, s_;
  double a0_ = 0, a2_ = 0, a4_ = 0, norm_ = 1, F_at_minus_s_ = 0;
};

}  // namespace

MarginalPtr gaussian_marginal(double variance) {
  return std::make_shared<GaussianMarginal>(variance);
}

MarginalPtr logistic_marginal(double scale) { return std::make_shared<LogisticMarginal>(scale); }

MarginalPtr smoothed_symmetric_pareto_marginal(double alpha, double smoothing_width) {
  return std::make_shared<SmoothedParetoMarginal>(alpha, smoothing_width);
}

double smoothed_pareto_variance(double alpha, double smoothing_width) {
  return SmoothedParetoMarginal(alpha, smoothing_width).variance();
}

OracleMarginal::OracleMarginal(Eigen::VectorXd sorted_sample) : sample_(std::move(sorted_sample)) {
  name_ = "oracle";
  const Eigen::Index m = sample_.size();
  if (m < 2) throw std::invalid_argument("OracleMarginal: need at least 2 points");

  // Binned Gaussian KDE with Silverman's bandwidth.
  const Eigen::Index bins = 4096;
  double mean = sample_.mean();
  double sd = std::sqrt((sample_.array() - mean).square().sum() / double(m - 1));
  double iqr = sample_[3 * m / 4] - sample_[m / 4];
  bandwidth_ = 0.9 * std::min(sd, iqr / 1.34) * std::pow(double(m), -0.2);

  double lo = sample_[0] - 4.0 * bandwidth_, hi = sample_[m - 1] + 4.0 * bandwidth_;
  double dx = (hi - lo) / double(bins - 1);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index b = static_cast<Eigen::Index>((sample_[i] - lo) / dx + 0.5);
    hist[std::clamp<Eigen::Index>(b, 0, bins - 1)] += 1.0;
  }
  Eigen::Index half = static_cast<Eigen::Index>(std::ceil(5.0 * bandwidth_ / dx));
  Eigen::VectorXd kernel(2 * half + 1);
  for (Eigen::Index j = -half; j <= half; ++j)
    kernel[j + half] = normal_pdf(double(j) * dx / bandwidth_) / (bandwidth_ * double(m));
  kde_grid_.resize(bins);
  kde_values_ = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index b = 0; b < bins; ++b) {
    kde_grid_[b] = lo + double(b) * dx;
    Eigen::Index j0 = std::max<Eigen::Index>(0, b - half);
    Eigen::Index j1 = std::min<Eigen::Index>(bins - 1, b + half);
    double acc = 0.0;
    for (Eigen::Index j = j0; j <= j1; ++j) acc += hist[j] * kernel[b - j + half];
    kde_values_[b] = acc;
  }
}

double OracleMarginal::cdf(double x) const {
  const Eigen::Index m = sample_.size();
  auto it = std::upper_bound(sample_.data(), sample_.data() + m, x);
  Eigen::Index k = it - sample_.data();  // # sample points <= x
  if (k == 0) return 0.5 / double(m + 1);
  if (k == m) return double(m) / double(m + 1);
  // linear interpolation between plotting positions k/(m+1) and (k+1)/(m+1)
  double x0 = sample_[k - 1], x1 = sample_[k];
  double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
  return (double(k) + t) / double(m + 1);
}

double OracleMarginal::quantile(double y) const {
  const Eigen::Index m = sample_.size();
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("OracleMarginal::quantile: y outside (0,1)");
  double pos = y * double(m + 1);  // inverse of the plotting positions
  Eigen::Index k = static_cast<Eigen::Index>(std::floor(pos));
  if (k < 1) return sample_[0];
  if (k >= m) return sample_[m - 1];
  double t = pos - double(k);
  return sample_[k - 1] + t * (sample_[k] - sample_[k - 1]);
}

double OracleMarginal::pdf(double x) const {
  const Eigen::Index bins = kde_grid_.size();
  double lo = kde_grid_[0], dx = kde_grid_[1] - kde_grid_[0];
  double p = (x - lo) / dx;
  if (p <= 0.0 || p >= double(bins - 1)) return 0.0;
  Eigen::Index b = static_cast<Eigen::Index>(p);
  double t = p - double(b);
  return kde_values_[b] * (1.0 - t) + kde_values_[b + 1] * t;
}

double OracleMarginal::pdf_deriv(double x) const {
  double h = bandwidth_;
  return (pdf(x + h) - pdf(x - h)) / (2.0 * h);
}

double OracleMarginal::pdf_second(double x) const {
  double h = bandwidth_;
  return (pdf(x + h) - 2.0 * pdf(x) + pdf(x - h)) / (h * h);
}

std::shared_ptr<const OracleMarginal> oracle_marginal_from_simulation(
    const CoefficientSpec& spec, const InnovationSpec& innovation_spec, Eigen::Index m,
    std::uint64_t seed) {
  if (m < 100000) throw std::invalid_argument("oracle_marginal_from_simulation: m must be >= 1e5");
  std::uint64_t K = std::min<std::uint64_t>(tail_truncation_index(spec), 1u << 16);
  Eigen::VectorXd c = make_coefficients(spec, K);

  // Each draw uses its own innovation window; blocks have fixed streams so
  // the merged sample is independent of scheduling.
  const Eigen::Index block = 4096;
  Eigen::VectorXd sample(m);
  Eigen::VectorXd window(static_cast<Eigen::Index>(K) + 1);
  for (Eigen::Index b0 = 0; b0 < m; b0 += block) {
    InnovationSampler sampler(innovation_spec, make_stream(seed, 1000 + b0 / block));
    Eigen::Index b1 = std::min(m, b0 + block);
    for (Eigen::Index i = b0; i < b1; ++i) {
      sampler.fill(window);
      sample[i] = c.dot(window);
    }
  }
  std::sort(sample.data(), sample.data() + m);
  return std::make_shared<OracleMarginal>(std::move(sample));
}

ConditionReport condition_report(const MarginalModel& model, int p) {
  if (p < 1 || p > 3) throw std::invalid_argument("condition_report: p must be 1, 2 or 3");
  ConditionReport rep;
  const ConditionFlags& fl = model.flags();
  rep.A = fl.A(p);
  rep.B = fl.B;
  rep.C = fl.C(p);
  rep.CsR1 = fl.CsR1;
  rep.CsR2 = fl.CsR2;
  rep.CsR3 = fl.CsR3;
  rep.CsR4 = fl.CsR4;
  rep.gamma1 = model.gamma1();
  rep.gamma2 = model.gamma2();
  rep.gamma = model.gamma();
  rep.gamma0 = model.gamma0();

  // Numeric spot check of (C(p)): sup over the grid of
  // |f^{(r+1)}(Q(y))/f(Q(y))| (y(1-y))^{1/2}, r < p, with divergence judged
  // by growth between the bulk grid and the dyadic tail refinement.
  auto term = [&](double y, int r) {
    double q = model.quantile(y);
    double f = model.pdf(q);
    double fr = (r == 0) ? model.pdf_deriv(q) : model.pdf_second(q);
    return std::abs(fr / f) * std::sqrt(y * (1.0 - y));
  };
  double sup_bulk = 0.0, sup_tail = 0.0;
  for (int j = 1; j <= 1023; ++j) {
    double y = double(j) / 1024.0;
    for (int r = 0; r < std::min(p, 2); ++r) sup_bulk = std::max(sup_bulk, term(y, r));
  }
  for (int j = 10; j <= 16; ++j) {
    double y = std::pow(2.0, -j);
    for (int r = 0; r < std::min(p, 2); ++r) {
      sup_tail = std::max(sup_tail, term(y, r));
      sup_tail = std::max(sup_tail, term(1.0 - y, r));
    }
  }
  rep.c_sup = std::max(sup_bulk, sup_tail);
  rep.c_divergent = sup_tail > 2.0 * sup_bulk;
  return rep;
}

}  // namespace lrdq
