// lrdq: simulation laboratory for quantile and Bahadur-Kiefer processes of
// long-range dependent linear sequences.
//
// Every subcommand reads the same key=value configuration (file via
// --config, overridden by flags), writes CSV with the fixed schema
// experiment,n,rep,statistic,value plus a summary text file, and exits 0
// exactly when all acceptance windows evaluated by the run passed.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lrdq/experiments.hpp"
#include "lrdq/second_order.hpp"
#include "lrdq/special.hpp"

namespace {

using namespace lrdq;

struct CliOptions {
  ExperimentConfig cfg;
  std::string innovations = "normal";
  std::string marginal = "gaussian";
  std::string n_list;          // comma-separated override of n_grid
  std::int64_t n_single = 0;   // single-n shorthand
  std::string out_dir;
  bool no_csv = false;
  bool no_summary = false;
  std::int64_t cov_lag = 1000;  // covcheck probe lag
};

void apply_enums(CliOptions& o) {
  if (o.innovations == "normal")
    o.cfg.innovations.law = InnovationSpec::Law::StandardNormal;
  else if (o.innovations == "laplace")
    o.cfg.innovations.law = InnovationSpec::Law::DoubleExponential;
  else if (o.innovations == "pareto")
    o.cfg.innovations.law = InnovationSpec::Law::SmoothedSymmetricPareto;
  else
    throw CLI::ValidationError("innovations", "must be normal|laplace|pareto");

  if (o.marginal == "gaussian")
    o.cfg.marginal = MarginalMode::Gaussian;
  else if (o.marginal == "logistic")
    o.cfg.marginal = MarginalMode::Logistic;
  else if (o.marginal == "pareto")
    o.cfg.marginal = MarginalMode::SmoothedPareto;
  else
    throw CLI::ValidationError("marginal", "must be gaussian|logistic|pareto");

  if (o.n_single > 0) o.cfg.n_grid = {o.n_single};
  if (!o.n_list.empty()) {
    o.cfg.n_grid.clear();
    std::stringstream ss(o.n_list);
    std::string item;
    while (std::getline(ss, item, ',')) o.cfg.n_grid.push_back(std::stoll(item));
  }
  if (o.out_dir.empty()) {
    const char* env = std::getenv("LRDQ_OUT_DIR");
    o.out_dir = env ? env : ".";
  }
}

std::vector<std::string> parameter_echo(const std::string& command, const CliOptions& o) {
  std::ostringstream ng;
  for (std::size_t i = 0; i < o.cfg.n_grid.size(); ++i)
    ng << (i ? "," : "") << o.cfg.n_grid[i];
  std::vector<std::string> echo;
  echo.push_back("command=" + command);
  auto put = [&echo](const std::string& k, const std::string& v) { echo.push_back(k + "=" + v); };
  char buf[64];
  auto putd = [&](const std::string& k, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    put(k, buf);
  };
  putd("beta", o.cfg.beta);
  put("innovations", o.innovations);
  put("marginal", o.marginal);
  put("n_grid", ng.str());
  put("reps", std::to_string(o.cfg.replications));
  put("seed", std::to_string(o.cfg.base_seed));
  putd("y0", o.cfg.y0);
  putd("mu", o.cfg.mu);
  putd("C0", o.cfg.C0);
  putd("nu", o.cfg.nu);
  putd("alpha", o.cfg.alpha_level);
  putd("trim_exponent", o.cfg.trim_exponent);
  put("p", std::to_string(o.cfg.p));
  putd("log_exponent", o.cfg.log_exponent);
  putd("eps", o.cfg.truncation_eps);
  putd("cap_factor", o.cfg.cap_factor);
  put("grid_m", std::to_string(o.cfg.grid_m));
  put("threads", std::to_string(o.cfg.threads));
  put("version=lrdq", "1.0");
  return echo;
}

void emit(const ExperimentReport& report, const std::string& command, const CliOptions& o) {
  const std::vector<std::string> echo = parameter_echo(command, o);
  std::filesystem::create_directories(o.out_dir);
  if (!o.no_csv) {
    std::ofstream csv(o.out_dir + "/" + command + ".csv");
    if (!csv) throw std::runtime_error("cannot write to output directory " + o.out_dir);
    report.write_csv(csv, echo);
  }
  if (!o.no_summary) {
    std::ofstream sum(o.out_dir + "/" + command + "_summary.txt");
    report.write_summary(sum, echo);
  }
  report.write_summary(std::cout, {});
}

// --- non-experiment commands ------------------------------------------------

ExperimentReport do_simulate(const CliOptions& o) {
  const std::int64_t n = o.cfg.n_grid.back();
  const CoefficientSpec spec = o.cfg.coefficient_spec();
  const LrdPath path =
      sample_path(spec, o.cfg.innovations, n, o.cfg.base_seed, o.cfg.truncation_for(n));
  ExperimentReport report;
  report.experiment = "simulate";
  for (Eigen::Index i = 0; i < path.n(); ++i)
    report.add_row(n, i + 1, "x", path.x[i]);
  report.add_summary("n", static_cast<double>(n));
  report.add_summary("K", static_cast<double>(path.K));
  return report;
}

ExperimentReport do_covcheck(const CliOptions& o) {
  // raw k^{-beta} L0(k) scale: the covariance target B(2*beta-1, 1-beta) is
  // stated for unit innovations and unnormalized coefficients
  CoefficientSpec spec = o.cfg.coefficient_spec();
  spec.normalize_unit_variance = false;
  SecondOrder so(spec);
  ExperimentReport report;
  report.experiment = "covcheck";
  const double expo = 2.0 * o.cfg.beta - 1.0;
  const double target = beta_function(expo, 1.0 - o.cfg.beta);

  // rho_k k^{2 beta - 1} trend over dyadic lags plus the probe lag
  double prev_gap = -1.0;
  bool trending = true;
  for (int j = 6; j <= 12; ++j) {
    const std::uint64_t k = 1ULL << j;
    const double scaled =
        so.rho(k) * std::pow(static_cast<double>(k), expo) /
        std::pow(spec.slowly_varying(static_cast<double>(k)), 2.0);
    report.add_row(static_cast<std::int64_t>(k), 0, "rho_scaled", scaled);
    const double gap = std::abs(scaled - target);
    if (prev_gap >= 0.0 && gap > prev_gap * 1.0000001) trending = false;
    prev_gap = gap;
  }
  const double probe = so.rho(static_cast<std::uint64_t>(o.cov_lag)) *
                       std::pow(static_cast<double>(o.cov_lag), expo) /
                       std::pow(spec.slowly_varying(static_cast<double>(o.cov_lag)), 2.0);
  report.add_summary("rho_scaled_probe", probe);
  report.add_summary("rho_scaled_target", target);
  report.add_summary("rho_rel_error", std::abs(probe - target) / target);
  report.add_summary("rho_trend_monotone", trending ? 1.0 : 0.0);

  // variance scaling: slope of log sigma^2_{n,1} against log n
  std::vector<double> logn, logs2;
  for (const std::int64_t n : o.cfg.n_grid) {
    const double s2 = std::pow(so.sigma_n1(n), 2.0);
    report.add_row(n, 0, "sigma2_n1", s2);
    logn.push_back(std::log(static_cast<double>(n)));
    logs2.push_back(std::log(s2));
  }
  double slope = 0.0;
  if (logn.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
      mx += logn[i];
      my += logs2[i];
    }
    mx /= logn.size();
    my /= logn.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
      sxx += (logn[i] - mx) * (logn[i] - mx);
      sxy += (logn[i] - mx) * (logs2[i] - my);
    }
    slope = sxy / sxx;
  }
  report.add_summary("sigma2_slope", slope);
  report.add_summary("sigma2_slope_expected", 3.0 - 2.0 * o.cfg.beta);
  report.accepted = std::abs(probe - target) / target <= 0.10 && trending &&
                    (logn.size() < 2 || std::abs(slope - (3.0 - 2.0 * o.cfg.beta)) <= 0.05);
  return report;
}

ExperimentReport do_rates(const CliOptions& o) {
  const SlowlyVarying L0 = o.cfg.coefficient_spec().slowly_varying;
  ExperimentReport report;
  report.experiment = "rates";
  double prev_ratio = -1.0;
  bool monotone = true;
  for (const std::int64_t n : o.cfg.n_grid) {
    const RateConstants rc = rate_constants(n, o.cfg.beta, L0, o.cfg.p);
    report.add_row(n, 0, "a_n", rc.a_n);
    report.add_row(n, 0, "b_n", rc.b_n);
    report.add_row(n, 0, "c_n", rc.c_n);
    report.add_row(n, 0, "d_np", rc.d_np);
    report.add_row(n, 0, "b_np", rc.b_np);
    report.add_row(n, 0, "delta_n", rc.delta_n);
    const double ratio = rc.d_np / rc.a_n;
    report.add_row(n, 0, "d_np_over_a_n", ratio);
    if (prev_ratio >= 0.0 && ratio > prev_ratio) monotone = false;
    prev_ratio = ratio;
  }
  report.add_summary("d_np_over_a_n_monotone_decreasing", monotone ? 1.0 : 0.0);
  // the ordering d_{n,p} = o(a_n) for p = 2 sets in far beyond desk scale
  // (the log^{5/2} factor dominates until log n ~ 25); track the analytic
  // ratio at astronomically large n to witness the eventual decrease
  auto analytic_ratio = [&](double dn) {
    const double logn = std::log(dn), llog = std::log(std::log(dn));
    const double crit = (o.cfg.p + 1) * (2.0 * o.cfg.beta - 1.0);
    const double l0 = L0(dn);
    const double d = crit > 1.0 ? std::pow(dn, -(1.0 - o.cfg.beta)) / l0 *
                                      std::pow(logn, 2.5) * std::pow(llog, 0.75)
                                : std::pow(dn, -o.cfg.p * (o.cfg.beta - 0.5)) *
                                      std::pow(l0, o.cfg.p) * std::sqrt(logn) *
                                      std::pow(llog, 0.75);
    const double a = std::pow(dn, -(o.cfg.beta - 0.5)) * l0 * llog;
    return d / a;
  };
  const double r1 = analytic_ratio(1e12), r2 = analytic_ratio(1e24), r3 = analytic_ratio(1e36);
  report.add_summary("d_np_over_a_n_at_1e12", r1);
  report.add_summary("d_np_over_a_n_at_1e24", r2);
  report.add_summary("d_np_over_a_n_at_1e36", r3);
  report.add_summary("d_np_over_a_n_eventually_decreasing", (r1 > r2 && r2 > r3) ? 1.0 : 0.0);
  return report;
}

ExperimentReport do_band(const CliOptions& o) {
  const std::int64_t n = o.cfg.n_grid.back();
  const CoefficientSpec spec = o.cfg.coefficient_spec();
  const std::uint64_t K = o.cfg.truncation_for(n);
  const Eigen::VectorXd coeffs = make_coefficients(spec, K);
  SecondOrder so(spec, coeffs, 1.0);
  const double sigma = so.sigma_n1(n);
  const LrdPath path = sample_path(spec, o.cfg.innovations, n, o.cfg.base_seed, K);
  MarginalPtr marginal = gaussian_marginal(1.0);
  const ConfidenceBand band = quantile_confidence_band(path, *marginal, sigma, o.cfg.nu,
                                                       o.cfg.alpha_level, o.cfg.beta,
                                                       o.cfg.grid_m);
  ExperimentReport report;
  report.experiment = "band";
  for (Eigen::Index i = 0; i < band.y.size(); ++i) {
    report.add_row(n, i, "y", band.y[i]);
    report.add_row(n, i, "lower", band.lower[i]);
    report.add_row(n, i, "upper", band.upper[i]);
  }
  report.add_summary("c_nu", band.c_nu);
  report.add_summary("z_alpha", band.z_alpha);
  report.add_summary("sigma_n1", sigma);
  return report;
}

ExperimentReport do_cbp(const CliOptions& o) {
  const double c = c_beta_p(o.cfg.beta, o.cfg.p);
  // Beta-identity cross-check: I(beta) = B(1-beta, 2*beta-1)
  const double i_quad = c * c * (1.0 - o.cfg.beta) * (3.0 - 2.0 * o.cfg.beta);
  const double i_gamma = beta_function(1.0 - o.cfg.beta, 2.0 * o.cfg.beta - 1.0);
  const double residual = std::abs(i_quad - i_gamma) / i_gamma;
  ExperimentReport report;
  report.experiment = "cbp";
  report.add_summary("c_beta_p", c);
  report.add_summary("I_quadrature", i_quad);
  report.add_summary("I_beta_identity", i_gamma);
  report.add_summary("identity_rel_residual", residual);
  report.accepted = residual <= 1e-8;
  std::cout << "c(" << o.cfg.beta << "," << o.cfg.p << ") = " << c
            << "  identity residual = " << residual << "\n";
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantile / Bahadur-Kiefer process laboratory for LRD linear sequences"};
  app.require_subcommand(1);

  CliOptions o;
  const std::vector<std::string> commands = {
      "simulate", "covcheck", "rates",    "reduce", "reduce-p2", "bk-uniform", "bk-general",
      "weak",     "lil",      "trim",     "band",   "coverage",  "subord",     "cbp"};

  std::vector<CLI::App*> subs;
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--beta", o.cfg.beta, "memory parameter in (1/2,1)");
    sub->add_option("--innovations", o.innovations, "normal|laplace|pareto");
    sub->add_option("--marginal", o.marginal, "gaussian|logistic|pareto");
    sub->add_option("--n", o.n_single, "single sample size");
    sub->add_option("--n-grid", o.n_list, "comma-separated sample sizes");
    sub->add_option("--reps", o.cfg.replications, "Monte Carlo replications (>= 50)");
    sub->add_option("--seed", o.cfg.base_seed, "base seed for derived streams");
    sub->add_option("--y0", o.cfg.y0, "pointwise target in (0,1)");
    sub->add_option("--mu", o.cfg.mu, "weight exponent shift (> 0)");
    sub->add_option("--C0", o.cfg.C0, "delta_n trimming constant");
    sub->add_option("--nu", o.cfg.nu, "confidence band exponent");
    sub->add_option("--alpha", o.cfg.alpha_level, "band significance level");
    sub->add_option("--trim-exponent", o.cfg.trim_exponent,
                    "l_n = n^{-e}; negative selects l_n = 0");
    sub->add_option("--p", o.cfg.p, "expansion order");
    sub->add_option("--log-exponent", o.cfg.log_exponent,
                    "L0(k) = log(k+e)^a slowly varying exponent");
    sub->add_option("--eps", o.cfg.truncation_eps, "coefficient tail variance budget");
    sub->add_option("--cap-factor", o.cfg.cap_factor, "truncation cap K <= factor*n");
    sub->add_option("--grid-m", o.cfg.grid_m, "uniform grid size");
    sub->add_option("--threads", o.cfg.threads, "worker threads");
    sub->add_option("--lag", o.cov_lag, "covcheck probe lag");
    sub->add_option("--out", o.out_dir, "output directory (default $LRDQ_OUT_DIR or .)");
    sub->add_flag("--no-csv", o.no_csv, "skip CSV emission");
    sub->add_flag("--no-summary", o.no_summary, "skip summary emission");
    sub->set_config("--config", "", "key=value configuration file");
    sub->allow_config_extras(false);
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    apply_enums(o);
    const std::string command = app.get_subcommands().front()->get_name();

    // single-n commands default to their documented scale when -n is absent
    auto default_n = [&](std::int64_t n) {
      if (o.n_single == 0 && o.n_list.empty()) o.cfg.n_grid = {n};
    };

    ExperimentReport report;
    if (command == "simulate") {
      default_n(1 << 10);
      report = do_simulate(o);
    } else if (command == "covcheck") {
      o.cfg.validate();
      report = do_covcheck(o);
    } else if (command == "rates") {
      o.cfg.validate();
      report = do_rates(o);
    } else if (command == "reduce") {
      report = run_reduction_experiment(o.cfg);
    } else if (command == "reduce-p2") {
      report = run_reduction_p2_experiment(o.cfg);
    } else if (command == "bk-uniform") {
      default_n(1 << 15);
      report = run_bk_uniform_experiment(o.cfg);
    } else if (command == "bk-general") {
      default_n(1 << 15);
      report = run_bk_general_experiment(o.cfg);
    } else if (command == "weak") {
      // weak-limit check only: bk-uniform at a single n
      default_n(1 << 15);
      o.cfg.n_grid = {o.cfg.n_grid.back()};
      report = run_bk_uniform_experiment(o.cfg);
      report.experiment = "weak";
      for (auto& row : report.rows) row.experiment = "weak";
    } else if (command == "lil") {
      if (o.n_single == 0 && o.n_list.empty()) {
        o.cfg.n_grid.clear();
        for (int j = 6; j <= 20; ++j) o.cfg.n_grid.push_back(1LL << j);
        o.cfg.cap_factor = std::min(o.cfg.cap_factor, 4.0);
      }
      report = run_lil_tracker(o.cfg);
    } else if (command == "trim") {
      default_n(1 << 14);
      report = run_trimmed_mean_test(o.cfg);
    } else if (command == "band") {
      default_n(1 << 12);
      o.cfg.validate();
      report = do_band(o);
    } else if (command == "coverage") {
      default_n(1 << 14);
      report = run_coverage_experiment(o.cfg);
    } else if (command == "subord") {
      default_n(1 << 14);
      if (o.marginal == "gaussian") {
        o.marginal = "logistic";
        o.cfg.marginal = MarginalMode::Logistic;
      }
      report = run_subordinated_comparison(o.cfg);
    } else if (command == "cbp") {
      report = do_cbp(o);
    }

    emit(report, command, o);
    return report.accepted ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
