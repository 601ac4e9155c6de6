#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lrdq/marginals.hpp"
#include "lrdq/path.hpp"
#include "lrdq/processes.hpp"

namespace lrdq {

enum class MarginalMode { Gaussian, Logistic, SmoothedPareto };

struct ExperimentConfig {
  double beta = 0.65;
  InnovationSpec innovations{};
  MarginalMode marginal = MarginalMode::Gaussian;
  std::vector<std::int64_t> n_grid = {1 << 10, 1 << 11, 1 << 12, 1 << 13,
                                      1 << 14, 1 << 15, 1 << 16};
  std::int64_t replications = 200;
  std::uint64_t base_seed = 1;
  double y0 = 0.3;
  double mu = 0.05;
  double C0 = 1.0;
  double nu = 0.9;
  double alpha_level = 0.05;
  // l_n = n^{-trim_exponent}; a negative exponent selects l_n = 0 exactly.
  double trim_exponent = 0.5;
  int p = 2;
  double log_exponent = 0.0;  // slowly varying L0(k) = (log(k+e))^log_exponent
  double truncation_eps = 1e-4;
  // Coefficient truncation used for path generation: K = min(spec index,
  // cap_factor * n). Proportional-to-n capping keeps the realized
  // coefficients on the same power law at every n, so rate slopes are
  // unaffected; the normalizer is always computed from the coefficients as
  // realized, never from the untruncated model.
  double cap_factor = 16.0;
  int grid_m = 4095;
  int threads = 1;

  void validate() const;
  CoefficientSpec coefficient_spec() const;  // unit-variance normalized
  std::uint64_t truncation_for(std::int64_t n) const;
};

struct CsvRow {
  std::string experiment;
  std::int64_t n = 0;
  std::int64_t rep = 0;
  std::string statistic;
  double value = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, double>> summary;  // insertion order kept
  std::vector<std::string> notes;
  bool accepted = true;  // all acceptance windows evaluated by the run passed

  void add_row(std::int64_t n, std::int64_t rep, const std::string& statistic, double value);
  void add_summary(const std::string& key, double value);
  double get(const std::string& key) const;  // throws on unknown key

  // CSV schema: experiment,n,rep,statistic,value with 17 significant digits;
  // the echo lines are emitted first as '#'-prefixed comments.
  void write_csv(std::ostream& os, const std::vector<std::string>& echo) const;
  void write_summary(std::ostream& os, const std::vector<std::string>& echo) const;
};

// --- shared numerics -------------------------------------------------------

double median_of(std::vector<double> values);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;  // bootstrap standard error of the slope
};

// OLS fit of log(median of samples) against log n, with the standard error
// obtained by resampling the per-n replication sets (B bootstrap rounds,
// deterministic in `seed`).
SlopeFit fit_loglog_slope(const std::vector<std::int64_t>& ns,
                          const std::vector<std::vector<double>>& samples_per_n,
                          std::uint64_t seed, int bootstrap_rounds = 200);

// Runs body(0..count-1) on `threads` workers.  Writers index disjoint slots,
// so the result layout is identical whatever the thread count.
void parallel_for_index(std::int64_t count, int threads,
                        const std::function<void(std::int64_t)>& body);

// CDF of a*Z^2 for standard normal Z: 2*Phi(sqrt(t/a)) - 1 on t >= 0 when
// a > 0, mirrored for a < 0.  Throws for a == 0 (degenerate target).
double chi_square_scaled_cdf(double t, double a);

// --- experiment drivers ----------------------------------------------------

ExperimentReport run_reduction_experiment(const ExperimentConfig& cfg);
ExperimentReport run_reduction_p2_experiment(const ExperimentConfig& cfg);
ExperimentReport run_bk_uniform_experiment(const ExperimentConfig& cfg);
ExperimentReport run_bk_general_experiment(const ExperimentConfig& cfg);
ExperimentReport run_lil_tracker(const ExperimentConfig& cfg);
ExperimentReport run_coverage_experiment(const ExperimentConfig& cfg);
ExperimentReport run_trimmed_mean_test(const ExperimentConfig& cfg);
ExperimentReport run_subordinated_comparison(const ExperimentConfig& cfg);

// --- confidence bands ------------------------------------------------------

struct ConfidenceBand {
  Eigen::VectorXd y;      // grid inside (1/n, 1-1/n)
  Eigen::VectorXd lower;  // Q_n(y) - half width
  Eigen::VectorXd upper;
  double c_nu = 0.0;
  double z_alpha = 0.0;
};

// Validates nu against the applicable (beta, gamma, conditions) inequality
// and throws naming the violated row.
void check_band_exponent(double nu, double beta, double gamma, const ConditionFlags& flags);

ConfidenceBand quantile_confidence_band(const LrdPath& path, const MarginalModel& marginal,
                                        double sigma_n1, double nu, double alpha_level,
                                        double beta, int grid_m);

}  // namespace lrdq
