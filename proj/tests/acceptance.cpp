// Acceptance harness: runs the twelve verification criteria end to end with
// pinned seeds and tolerances and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "lrdq/experiments.hpp"
#include "lrdq/second_order.hpp"
#include "lrdq/special.hpp"

using namespace lrdq;

namespace {

constexpr std::uint64_t kSeed = 20260826;
int failures = 0;
std::chrono::steady_clock::time_point t_start;

void report(int idx, const std::string& what, bool pass, const std::string& detail) {
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::printf("%s criterion %2d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL", idx,
              what.c_str(), detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!pass) ++failures;
  t_start = std::chrono::steady_clock::now();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.base_seed = kSeed;
  return cfg;
}

// 1. rho_k k^{2 beta - 1} approaches B(2 beta - 1, 1 - beta), monotonically
// over dyadic lags, within 10% at k = 1000.
void criterion_1() {
  CoefficientSpec spec;
  spec.beta = 0.7;
  spec.truncation_eps = 1e-6;
  SecondOrder so(spec);
  const double target = beta_function(2 * spec.beta - 1, 1 - spec.beta);
  bool monotone = true;
  double prev_gap = 1e300;
  for (int j = 6; j <= 12; ++j) {
    std::uint64_t k = 1ull << j;
    double scaled = so.rho(k) * std::pow(double(k), 2 * spec.beta - 1);
    double gap = std::abs(scaled / target - 1.0);
    if (gap >= prev_gap) monotone = false;
    prev_gap = gap;
  }
  double probe = so.rho(1000) * std::pow(1000.0, 2 * spec.beta - 1);
  double rel = std::abs(probe / target - 1.0);
  report(1, "autocovariance power law", rel <= 0.10 && monotone,
         fmt("rel err %.4f <= 0.10, dyadic trend monotone=%.0f", rel, monotone ? 1.0 : 0.0));
}

// 2. log sigma^2_{n,1} vs log n slope equals 3 - 2 beta within 0.05.
void criterion_2() {
  bool pass = true;
  std::string detail;
  // Exact covariances of the canonical (default-truncation) model. The
  // finite-n slope approaches 3 - 2 beta from above; beta = 0.8 sits at
  // +0.048 over this range, close to the edge of the window.
  for (double beta : {0.6, 0.7, 0.8}) {
    CoefficientSpec spec;
    spec.beta = beta;
    SecondOrder so(spec);
    std::vector<double> lx, ly;
    for (int j = 10; j <= 16; ++j) {
      lx.push_back(std::log(std::pow(2.0, j)));
      ly.push_back(std::log(so.sigma2_n1(1ll << j)));
    }
    double slope = ols_slope(lx, ly);
    pass = pass && std::abs(slope - (3 - 2 * beta)) <= 0.05;
    detail += fmt("beta=%.1f slope=%.3f ", beta, slope);
  }
  report(2, "partial-sum variance growth", pass, detail + "window +-0.05");
}

// 3. c(beta,1) vs the closed Beta-function form, and the spot value.
void criterion_3() {
  double worst = 0.0;
  for (double beta : {0.55, 0.65, 0.75, 0.85, 0.95}) {
    double closed = std::sqrt(beta_function(1 - beta, 2 * beta - 1) /
                              ((1 - beta) * (3 - 2 * beta)));
    worst = std::max(worst, std::abs(c_beta_p(beta, 1) - closed) / closed);
  }
  double spot = c_beta_p(0.75, 1);
  bool pass = worst <= 1e-8 && std::abs(spot - 3.7395) <= 1e-3;
  report(3, "limsup constant identity", pass,
         fmt("max rel err %.2e <= 1e-8, c(0.75)=%.5f", worst, spot));
}

// 4. FFT-based Y_{n,2} against O(n K^2) pair enumeration, 100 seeds.
void criterion_4() {
  CoefficientSpec spec;
  spec.beta = 0.7;
  spec.normalize_unit_variance = true;
  InnovationSpec inn;
  std::mt19937_64 pick(kSeed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Index n = 8 + static_cast<Eigen::Index>(pick() % 57);
    std::uint64_t K = 4 + pick() % 29;
    LrdPath p = sample_path(spec, inn, n, kSeed + trial, K);
    double fast = partial_sum_y(p, 2);
    double slow = 0.0;
    for (Eigen::Index i = 1; i <= p.n(); ++i)
      for (std::uint64_t j = 0; j <= K; ++j)
        for (std::uint64_t k = j + 1; k <= K; ++k)
          slow += p.coeffs[Eigen::Index(j)] * p.coeffs[Eigen::Index(k)] *
                  p.innovations[i - 1 + Eigen::Index(K - j)] *
                  p.innovations[i - 1 + Eigen::Index(K - k)];
    worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
  }
  report(4, "quadratic partial sums vs enumeration", worst <= 1e-9,
         fmt("max rel err %.2e <= 1e-9 over 100 seeds", worst));
}

// 5. First-order reduction: weighted sup decays with log-log slope
// -(beta - 1/2) = -0.15 within +-0.08 (beta = 0.65, 200 replications).
void criterion_5() {
  ExperimentConfig cfg = base_config();  // defaults: beta 0.65, n = 2^10..2^16
  cfg.replications = 200;
  ExperimentReport rep = run_reduction_experiment(cfg);
  report(5, "reduction principle decay rate", rep.accepted,
         fmt("slope %.4f vs -0.15 +- 0.08 (se %.4f)", rep.get("slope"),
             rep.get("slope_se")));
}

// 6. Pointwise weak limit of the uniform Bahadur-Kiefer statistic:
// KS distance to the scaled chi-square law at y0 = 0.3 within 0.15.
void criterion_6() {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {1 << 15};
  cfg.replications = 300;
  ExperimentReport rep = run_bk_uniform_experiment(cfg);
  report(6, "uniform Bahadur-Kiefer weak limit", rep.accepted,
         fmt("KS %.4f <= 0.15, a=%.4f", rep.get("ks_T_vs_aZ2"), rep.get("weak_limit_a")));
}

// 7. General vs uniform Bahadur-Kiefer limit: the pointwise ratio has the
// predicted factor 1/2 (median within 0.5 +- 0.1).
void criterion_7() {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {1 << 15};
  cfg.replications = 300;
  ExperimentReport rep = run_bk_general_experiment(cfg);
  report(7, "general/uniform BK ratio", rep.accepted,
         fmt("median ratio %.4f vs 0.5 +- 0.1", rep.get("median_ratio")));
}

// 8. Geometric identity: |u_n(y) - alpha_n(U_n(y))| <= sigma^{-1} at every
// grid point of every replication (the a.s. finite-n bound, no tolerance
// beyond floating-point rounding).
void criterion_8() {
  CoefficientSpec spec;
  spec.beta = 0.65;
  spec.normalize_unit_variance = true;
  InnovationSpec inn;
  MarginalPtr g = gaussian_marginal(1.0);
  const Eigen::Index n = 1024;
  const std::uint64_t K = 1 << 14;
  Eigen::VectorXd coeffs = make_coefficients(spec, K);
  const double sigma = SecondOrder(spec, coeffs).sigma_n1(n);
  YGrid grid = YGrid::tail_refined(1023).merged_with_sample_points(n);

  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    LrdPath p = sample_path(spec, inn, n, kSeed + 31 * rep, K);
    ProcessSample u = build_process(p, *g, grid, ProcessId::u_n, 1, sigma);
    EmpiricalCdf E(uniform_transform(p, *g));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      double Un = E.quantile(grid.points[i]);
      double alpha_at_Un = double(n) / sigma * (E(Un) - Un);
      worst = std::max(worst, sigma * std::abs(u.values[i] - alpha_at_Un));
    }
  }
  report(8, "quantile/empirical geometric identity", worst <= 1.0 + 1e-9,
         fmt("max sigma*|u_n - alpha_n(U_n)| = %.12f <= 1", worst));
}

// 9. Trimmed-sum CLT: KS distance to N(0,1) within 0.10 at n = 2^14 with
// l_n = n^{-1/2}; with l_n = 0 the trimmed and plain sums agree bit for bit.
void criterion_9() {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {1 << 14};
  cfg.replications = 300;
  ExperimentReport rep = run_trimmed_mean_test(cfg);
  bool ks_ok = rep.accepted;
  double ks = rep.get("ks_vs_normal");

  ExperimentConfig zero = base_config();
  zero.n_grid = {1 << 10};
  zero.replications = 50;
  zero.trim_exponent = -1.0;
  ExperimentReport rz = run_trimmed_mean_test(zero);
  bool exact = true;
  double trimmed = 0.0;
  for (const CsvRow& row : rz.rows) {
    if (row.statistic == "trimmed_sum") trimmed = row.value;
    if (row.statistic == "untrimmed_sum" && row.value != trimmed) exact = false;
  }
  report(9, "trimmed-sum normal limit", ks_ok && exact,
         fmt("KS %.4f <= 0.10, zero-trim exact=%.0f", ks, exact ? 1.0 : 0.0));
}

// 10. Confidence band coverage at nominal 95%: empirical coverage >= 0.90.
void criterion_10() {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {1 << 14};
  cfg.replications = 300;
  ExperimentReport rep = run_coverage_experiment(cfg);
  report(10, "quantile confidence band coverage", rep.accepted,
         fmt("coverage %.3f >= 0.90 at nominal 0.95", rep.get("coverage")));
}

// 11. Determinism: CSV bodies are byte-identical under 1, 4 and 8 threads.
void criterion_11() {
  std::vector<std::string> bodies;
  for (int threads : {1, 4, 8}) {
    ExperimentConfig cfg = base_config();
    cfg.n_grid = {1 << 10};
    cfg.replications = 64;
    cfg.threads = threads;
    ExperimentReport rep = run_trimmed_mean_test(cfg);
    std::ostringstream os;
    rep.write_csv(os, {});
    bodies.push_back(os.str());
  }
  bool pass = bodies[0] == bodies[1] && bodies[0] == bodies[2];
  report(11, "thread-count determinism", pass,
         fmt("byte-identical CSV bodies across {1,4,8} threads, %.0f bytes",
             double(bodies[0].size())));
}

// 12. Subordinated contrast: the heavier-tailed target inflates the tail
// quantile process beyond the linear baseline, while the identity transform
// is statistically indistinguishable from it (sign test p > 0.05).
void criterion_12() {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {1 << 14};
  cfg.replications = 100;
  cfg.marginal = MarginalMode::Logistic;
  ExperimentReport rep = run_subordinated_comparison(cfg);
  report(12, "subordination tail contrast", rep.accepted,
         fmt("identity sign test p=%.3f > 0.05, contrast=%.0f",
             rep.get("identity_sign_test_pvalue"),
             rep.get("subordinated_exceeds_linear_final")));
}

}  // namespace

int main() {
  t_start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (failures == 0)
    std::printf("all 12 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
