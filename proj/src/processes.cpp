#include "lrdq/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrdq/special.hpp"

namespace lrdq {

EmpiricalCdf::EmpiricalCdf(const Eigen::VectorXd& x) : sorted_(x) {
  if (sorted_.size() < 1) throw std::invalid_argument("EmpiricalCdf: empty sample");
  std::sort(sorted_.data(), sorted_.data() + sorted_.size());
}

double EmpiricalCdf::operator()(double x) const {
  const double* b = sorted_.data();
  const double* e = b + sorted_.size();
  return static_cast<double>(std::upper_bound(b, e, x) - b) /
         static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double y) const {
  if (y <= 0.0) throw std::domain_error("sample quantile: y must be positive");
  if (y > 1.0) throw std::domain_error("sample quantile: y must be <= 1");
  const auto n = sorted_.size();
  // Q_n(y) = X_{ceil(n y):n}, left-continuous
  Eigen::Index k = static_cast<Eigen::Index>(std::ceil(y * static_cast<double>(n)));
  k = std::min<Eigen::Index>(std::max<Eigen::Index>(k, 1), n);
  return sorted_[k - 1];
}

double empirical_cdf(const LrdPath& path, double x) { return EmpiricalCdf(path.x)(x); }

double sample_quantile(const LrdPath& path, double y) {
  return EmpiricalCdf(path.x).quantile(y);
}

Eigen::VectorXd uniform_transform(const LrdPath& path, const MarginalModel& marginal) {
  Eigen::VectorXd u(path.x.size());
  for (Eigen::Index i = 0; i < path.x.size(); ++i) u[i] = marginal.cdf(path.x[i]);
  return u;
}

namespace {

// Fraction of sorted values <= y.
double sorted_ecdf(const Eigen::VectorXd& sorted, double y) {
  const double* b = sorted.data();
  const double* e = b + sorted.size();
  return static_cast<double>(std::upper_bound(b, e, y) - b) /
         static_cast<double>(sorted.size());
}

double sorted_quantile(const Eigen::VectorXd& sorted, double y) {
  const auto n = sorted.size();
  Eigen::Index k = static_cast<Eigen::Index>(std::ceil(y * static_cast<double>(n)));
  k = std::min<Eigen::Index>(std::max<Eigen::Index>(k, 1), n);
  return sorted[k - 1];
}

}  // namespace

ProcessSample build_process(const LrdPath& path, const MarginalModel& marginal,
                            const YGrid& grid, ProcessId id, int p, double sigma_n1) {
  if (!(sigma_n1 > 0.0)) throw std::invalid_argument("build_process: sigma_n1 must be > 0");
  if (id == ProcessId::v_tilde_np && p != 1 && p != 2)
    throw std::invalid_argument("build_process: v_tilde_np supports p in {1,2} only");

  const Eigen::Index n = path.n();
  const double dn = static_cast<double>(n);
  const double inv_sigma = 1.0 / sigma_n1;

  // Sorted copies: X order statistics, and U_i = F(X_i) (same order since F
  // is increasing, so sorting once and mapping keeps the ties/jumps aligned).
  Eigen::VectorXd xs = path.x;
  std::sort(xs.data(), xs.data() + n);
  Eigen::VectorXd us(n);
  for (Eigen::Index i = 0; i < n; ++i) us[i] = marginal.cdf(xs[i]);

  const double y1 = (id == ProcessId::v_tilde_np) ? partial_sum_y(path, 1) : 0.0;
  const double y2 = (id == ProcessId::v_tilde_np && p == 2) ? partial_sum_y(path, 2) : 0.0;

  ProcessSample out;
  out.grid = grid;
  out.id = id;
  out.n = n;
  out.normalizer = sigma_n1;
  out.p = p;
  out.values.resize(grid.size());

  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double y = grid.points[g];
    double v = 0.0;
    switch (id) {
      case ProcessId::alpha_n:
        v = inv_sigma * dn * (sorted_ecdf(us, y) - y);
        break;
      case ProcessId::u_n:
        v = inv_sigma * dn * (y - sorted_quantile(us, y));
        break;
      case ProcessId::q_n:
        v = inv_sigma * dn * (marginal.quantile(y) - sorted_quantile(xs, y));
        break;
      case ProcessId::beta_n_at_Q: {
        const double q = marginal.quantile(y);
        v = inv_sigma * dn * (sorted_ecdf(xs, q) - marginal.cdf(q));
        break;
      }
      case ProcessId::bk_general: {
        const double alpha = inv_sigma * dn * (sorted_ecdf(us, y) - y);
        const double q = inv_sigma * dn * (marginal.quantile(y) - sorted_quantile(xs, y));
        v = alpha - marginal.density_quantile(y) * q;
        break;
      }
      case ProcessId::bk_uniform: {
        const double alpha = inv_sigma * dn * (sorted_ecdf(us, y) - y);
        const double u = inv_sigma * dn * (y - sorted_quantile(us, y));
        v = alpha - u;
        break;
      }
      case ProcessId::v_tilde_np:
        v = -marginal.density_quantile(y) * y1;
        if (p == 2) v += marginal.fprime_at_q(y) * y2;
        break;
    }
    out.values[g] = v;
  }
  return out;
}

double weight_psi(int which, double y, const WeightContext& ctx) {
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("weight_psi: y must lie in (0,1)");
  if (!(ctx.mu > 0.0)) throw std::invalid_argument("weight_psi: mu must be positive");
  if (!(ctx.gamma >= 1.0)) throw std::invalid_argument("weight_psi: gamma must be >= 1");
  const double w = y * (1.0 - y);
  const bool small_beta = ctx.beta < 0.75;
  switch (which) {
    case 1:
      if (ctx.reduction_p > 0 && ctx.flags.A(ctx.reduction_p)) return 1.0;
      if (small_beta) return ctx.flags.C2 ? 1.0 : std::pow(w, ctx.gamma - 0.5 + ctx.mu);
      return std::pow(w, ctx.gamma + ctx.mu);
    case 2:
      if (small_beta) {
        if (ctx.flags.C3 || ctx.gamma < 1.5) return std::pow(w, 1.0 + ctx.mu);
        return std::pow(w, ctx.gamma - 0.5 + ctx.mu);
      }
      return std::pow(w, ctx.gamma + ctx.mu);
    case 3:
      if (small_beta)
        return ctx.flags.C3 ? std::pow(w, 1.0 + ctx.mu)
                            : std::pow(w, 2.0 * ctx.gamma - 1.0 + ctx.mu);
      return std::pow(w, 2.0 + 2.0 * ctx.gamma + ctx.mu);
    case 4:
      return small_beta ? 1.0 : w;
    default:
      throw std::invalid_argument("weight_psi: selector must be 1..4");
  }
}

RateConstants rate_constants(std::int64_t n, double beta, const SlowlyVarying& L0, int p) {
  if (n < 16) throw std::invalid_argument("rate_constants: n must be >= 16");
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("rate_constants: beta must lie in (1/2,1)");
  if (p < 1) throw std::invalid_argument("rate_constants: p must be >= 1");

  const double crit = (p + 1) * (2.0 * beta - 1.0);
  if (std::abs(crit - 1.0) < 1e-12)
    throw std::domain_error("rate_constants: boundary case (p+1)(2*beta-1) = 1 is excluded");

  const double dn = static_cast<double>(n);
  const double logn = std::log(dn);
  const double llogn = std::log(std::log(std::max(dn, 16.0)));
  const double l0 = L0(static_cast<std::uint64_t>(n));

  RateConstants rc;
  rc.a_n = std::pow(dn, -(beta - 0.5)) * l0 * llogn;
  rc.b_n = std::pow(dn, -(3.0 * beta - 2.5)) * l0 * l0 * l0 * std::pow(llogn, 1.5);
  rc.c_n = std::pow(dn, -(2.0 * beta - 1.0)) * l0 * l0 * std::pow(llogn, 1.5) *
           std::sqrt(logn);
  if (crit > 1.0) {
    rc.d_branch = 1;
    rc.d_np = std::pow(dn, -(1.0 - beta)) / l0 * std::pow(logn, 2.5) * std::pow(llogn, 0.75);
  } else {
    rc.d_branch = -1;
    rc.d_np = std::pow(dn, -p * (beta - 0.5)) * std::pow(l0, p) * std::sqrt(logn) *
              std::pow(llogn, 0.75);
  }
  // sigma_{n,1}^2 / n enters through its slowly varying power-law form
  // n^{2-2*beta} L0^2, matching the simplification used for a_n, b_n, c_n.
  rc.b_np = std::pow(dn, 2.0 - 2.0 * beta) * l0 * l0 * rc.d_np * std::sqrt(llogn);
  rc.delta_n = std::pow(dn, -(2.0 * beta - 1.0)) * l0 * l0 * llogn;
  return rc;
}

double c_beta_p(double beta, int p) {
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("c_beta_p: beta must lie in (1/2,1)");
  if (p < 1) throw std::invalid_argument("c_beta_p: p must be >= 1");
  // I(beta) = int_0^inf x^{-beta}(1+x)^{-beta} dx; with x = t/(1-t) the
  // integrand becomes t^{-beta} (1-t)^{2 beta - 2} on (0,1).
  auto integrand = [beta](double t, double omt) {
    return std::pow(t, -beta) * std::pow(omt, 2.0 * beta - 2.0);
  };
  QuadratureResult quad = tanh_sinh_01(integrand, 1e-12, 14);
  if (!quad.converged)
    throw std::runtime_error("c_beta_p: quadrature did not converge (abs error " +
                             std::to_string(quad.abs_error) + ")");
  return std::sqrt(quad.value / ((1.0 - beta) * (3.0 - 2.0 * beta)));
}

double weighted_sup(const ProcessSample& sample,
                    const std::function<double(double)>& weight, const SupOptions& opts) {
  double lo = 0.0, hi = 1.0;
  switch (opts.range) {
    case SupOptions::Range::full:
      break;
    case SupOptions::Range::delta_trim:
      if (!(opts.delta_n > 0.0))
        throw std::invalid_argument("weighted_sup: delta_trim requires delta_n > 0");
      lo = opts.C0 * opts.delta_n;
      hi = 1.0 - opts.C0 * opts.delta_n;
      break;
    case SupOptions::Range::one_over_n:
      lo = 1.0 / static_cast<double>(sample.n);
      hi = 1.0 - lo;
      break;
  }
  if (!(lo < hi)) throw std::domain_error("weighted_sup: trimming range is empty");

  double best = -1.0;
  for (Eigen::Index g = 0; g < sample.grid.size(); ++g) {
    const double y = sample.grid.points[g];
    if (y < lo || y > hi) continue;
    best = std::max(best, weight(y) * std::abs(sample.values[g]));
  }
  if (best < 0.0) throw std::domain_error("weighted_sup: no grid points inside the range");
  return best;
}

double ks_distance(const Eigen::VectorXd& sample, const std::function<double(double)>& cdf) {
  Eigen::VectorXd s = sample;
  const Eigen::Index n = s.size();
  if (n < 1) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(s.data(), s.data() + n);
  double d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double F = cdf(s[i]);
    d = std::max(d, std::abs((i + 1.0) / n - F));
    d = std::max(d, std::abs(static_cast<double>(i) / n - F));
  }
  return d;
}

double ks_distance_two_sample(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd sa = a, sb = b;
  if (sa.size() < 1 || sb.size() < 1)
    throw std::invalid_argument("ks_distance_two_sample: empty sample");
  std::sort(sa.data(), sa.data() + sa.size());
  std::sort(sb.data(), sb.data() + sb.size());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  Eigen::Index i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

}  // namespace lrdq
