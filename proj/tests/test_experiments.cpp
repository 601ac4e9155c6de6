#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lrdq/experiments.hpp"
#include "lrdq/second_order.hpp"
#include "lrdq/special.hpp"

using namespace lrdq;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.beta = 0.65;
  cfg.n_grid = {256, 512};
  cfg.replications = 50;
  cfg.grid_m = 127;
  cfg.cap_factor = 4.0;
  return cfg;
}

}  // namespace

TEST_CASE("config validation rejects malformed setups") {
  ExperimentConfig cfg = small_config();
  cfg.replications = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.beta = 0.75;
  cfg.p = 1;  // boundary (p+1)(2 beta - 1) = 1
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.y0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.n_grid = {512, 256};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  CHECK_NOTHROW(small_config().validate());
}

TEST_CASE("median and log-log slope fitting") {
  CHECK(median_of({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));

  // exact power law: slope recovered to rounding, bootstrap se collapses
  std::vector<std::int64_t> ns = {1024, 2048, 4096, 8192};
  std::vector<std::vector<double>> samples;
  for (auto n : ns)
    samples.push_back(std::vector<double>(60, std::pow(double(n), -0.3)));
  SlopeFit fit = fit_loglog_slope(ns, samples, 99);
  CHECK(fit.slope == doctest::Approx(-0.3).epsilon(1e-10));
  CHECK(fit.se <= 1e-10);
}

TEST_CASE("parallel index loop fills slots independently of the thread count") {
  const std::int64_t count = 1000;
  std::vector<double> a(count), b(count);
  auto body = [](std::vector<double>& out) {
    return [&out](std::int64_t i) { out[static_cast<std::size_t>(i)] = std::sqrt(double(i)); };
  };
  parallel_for_index(count, 1, body(a));
  parallel_for_index(count, 3, body(b));
  CHECK(a == b);
}

TEST_CASE("scaled chi-square CDF is a valid distribution function") {
  double prev = -1.0;
  for (double t = 0.0; t <= 10.0; t += 0.25) {
    double v = chi_square_scaled_cdf(t, 0.18233);
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(chi_square_scaled_cdf(-1.0, 0.5) == doctest::Approx(0.0));
  CHECK(chi_square_scaled_cdf(100.0, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
  // negative scale mirrors the positive-scale law: P(aZ^2 <= t) = 1 - P(-aZ^2 <= -t)
  CHECK(chi_square_scaled_cdf(-1.0, -0.5) ==
        doctest::Approx(1.0 - chi_square_scaled_cdf(1.0, 0.5)).epsilon(1e-12));
  CHECK(chi_square_scaled_cdf(0.5, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(chi_square_scaled_cdf(1.0, 0.0), std::domain_error);
}

TEST_CASE("reduction experiment produces a slope summary on a small grid") {
  ExperimentConfig cfg = small_config();
  ExperimentReport rep = run_reduction_experiment(cfg);
  CHECK(rep.experiment == "reduce");
  CHECK(rep.rows.size() >= static_cast<std::size_t>(cfg.replications) * cfg.n_grid.size());
  CHECK(std::isfinite(rep.get("slope")));
  CHECK(rep.get("slope_expected") == doctest::Approx(-0.15));
  for (const CsvRow& row : rep.rows)
    if (row.statistic == "sup_psi1_reduction") CHECK(row.value >= 0.0);
  CHECK_THROWS_AS(rep.get("no_such_key"), std::out_of_range);
}

TEST_CASE("degenerate confidence level drives coverage to zero") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {1024};
  cfg.alpha_level = 1.0;  // z = 0: the band collapses onto Q_n
  ExperimentReport rep = run_coverage_experiment(cfg);
  CHECK(rep.get("coverage") <= 0.05);
  CHECK_FALSE(rep.accepted);
}

TEST_CASE("zero trimming reproduces the full sum bit for bit") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {256};
  cfg.trim_exponent = -1.0;  // l_n = 0
  ExperimentReport rep = run_trimmed_mean_test(cfg);
  double trimmed = 0.0, untrimmed = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].statistic == "trimmed_sum") trimmed = rep.rows[i].value;
    if (rep.rows[i].statistic == "untrimmed_sum") {
      untrimmed = rep.rows[i].value;
      CHECK(trimmed == untrimmed);  // exact equality, same summation order
      ++pairs;
    }
  }
  CHECK(pairs == cfg.replications);
  CHECK(rep.get("median_abs_trim_gap_n256") == doctest::Approx(0.0));
}

TEST_CASE("over-trimming is rejected") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {64};
  cfg.trim_exponent = 0.1;  // 64^{-0.1} ~ 0.66 >= 1/2
  CHECK_THROWS_AS(run_trimmed_mean_test(cfg), std::domain_error);
}

TEST_CASE("CSV bodies are identical for any thread count") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {256};
  std::string body[2];
  int threads[2] = {1, 4};
  for (int t = 0; t < 2; ++t) {
    cfg.threads = threads[t];
    ExperimentReport rep = run_trimmed_mean_test(cfg);
    std::ostringstream os;
    rep.write_csv(os, {});
    body[t] = os.str();
  }
  CHECK(body[0] == body[1]);
}

TEST_CASE("band exponent validity rows") {
  ConditionFlags gaussian_flags;
  gaussian_flags.C1 = gaussian_flags.C2 = gaussian_flags.C3 = true;
  // beta < 3/4 with (C2): nu > gamma - (beta - 1/2) = 0.85
  CHECK_NOTHROW(check_band_exponent(0.9, 0.65, 1.0, gaussian_flags));
  CHECK_THROWS_AS(check_band_exponent(0.8, 0.65, 1.0, gaussian_flags), std::invalid_argument);
  // beta >= 3/4: nu > 2 gamma - (beta - 1/2) = 1.7
  CHECK_THROWS_AS(check_band_exponent(0.9, 0.8, 1.0, gaussian_flags), std::invalid_argument);
  CHECK_NOTHROW(check_band_exponent(1.75, 0.8, 1.0, gaussian_flags));
  // beta < 3/4 without any smoothness: nu > 2 gamma - beta
  ConditionFlags none;
  CHECK_THROWS_AS(check_band_exponent(1.3, 0.65, 1.0, none), std::invalid_argument);
  CHECK_NOTHROW(check_band_exponent(1.4, 0.65, 1.0, none));
}

TEST_CASE("confidence band width follows the closed form") {
  CoefficientSpec spec;
  spec.beta = 0.65;
  spec.normalize_unit_variance = true;
  InnovationSpec inn;
  LrdPath p = sample_path(spec, inn, 512, 4, 2048);
  MarginalPtr g = gaussian_marginal(1.0);
  double sigma = SecondOrder(spec, p.coeffs).sigma_n1(p.n());

  ConfidenceBand band = quantile_confidence_band(p, *g, sigma, 0.9, 0.05, 0.65, 63);
  CHECK(band.c_nu == doctest::Approx(std::pow(4.0, -0.9)).epsilon(1e-12));
  CHECK(band.c_nu == doctest::Approx(0.28717).epsilon(1e-4));
  CHECK(band.z_alpha == doctest::Approx(1.959963984540054).epsilon(1e-9));
  const double n = static_cast<double>(p.n());
  for (Eigen::Index i = 0; i < band.y.size(); ++i) {
    double y = band.y[i];
    CHECK(y > 1.0 / n);
    CHECK(y < 1.0 - 1.0 / n);
    double width = 2.0 * sigma / n * band.c_nu * band.z_alpha *
                   std::pow(y * (1.0 - y), -0.9);
    CHECK(band.upper[i] - band.lower[i] == doctest::Approx(width).epsilon(1e-10));
    CHECK(band.upper[i] > band.lower[i]);
  }
}
