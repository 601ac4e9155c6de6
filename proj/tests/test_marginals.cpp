#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lrdq/marginals.hpp"
#include "lrdq/special.hpp"

using namespace lrdq;

TEST_CASE("gaussian marginal reference values") {
  MarginalPtr g = gaussian_marginal(1.0);
  CHECK(g->density_quantile(0.5) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(g->fprime_at_q(0.3) == doctest::Approx(0.18233).epsilon(1e-4));
  for (double y : {0.01, 0.2, 0.5, 0.8, 0.99})
    CHECK(g->cdf(g->quantile(y)) == doctest::Approx(y).epsilon(1e-10));
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0})
    CHECK(g->quantile(g->cdf(x)) == doctest::Approx(x).epsilon(1e-8));
}

TEST_CASE("gaussian derivatives agree with finite differences") {
  MarginalPtr g = gaussian_marginal(2.0);
  const double h = 1e-5;
  for (double x : {-1.5, 0.0, 0.7, 2.0}) {
    double fd1 = (g->pdf(x + h) - g->pdf(x - h)) / (2 * h);
    CHECK(g->pdf_deriv(x) == doctest::Approx(fd1).epsilon(1e-4));
    double fd2 = (g->pdf(x + h) - 2 * g->pdf(x) + g->pdf(x - h)) / (h * h);
    CHECK(g->pdf_second(x) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("logistic density-quantile identities") {
  // With unit scale, f(Q(y)) = y(1-y), (f o Q)' = 1 - 2y, (f o Q)'' = -2.
  MarginalPtr l = logistic_marginal(1.0);
  for (double y : {0.1, 0.25, 0.5, 0.8}) {
    CHECK(l->density_quantile(y) == doctest::Approx(y * (1 - y)).epsilon(1e-12));
    CHECK(l->score_deriv(y) == doctest::Approx(1.0 - 2.0 * y).epsilon(1e-10));
    CHECK(l->second_deriv(y) == doctest::Approx(-2.0).epsilon(1e-8));
  }
  CHECK(l->gamma() == doctest::Approx(1.0));
}

TEST_CASE("condition flags for the standard families") {
  // The gaussian score -(f o Q)' = z is unbounded, so (A) and (B) fail
  // while the smoothness ratios (C) hold.
  MarginalPtr g = gaussian_marginal(1.0);
  CHECK_FALSE(g->flags().A1);
  CHECK_FALSE(g->flags().B);
  CHECK(g->flags().C2);
  CHECK(g->flags().CsR_all());
  MarginalPtr l = logistic_marginal(1.0);
  CHECK(l->flags().A1);
  CHECK(l->flags().B);
  CHECK(l->flags().C2);
  CHECK(l->flags().C3);
}

TEST_CASE("smoothed symmetric Pareto marginal") {
  CHECK_THROWS_AS(smoothed_symmetric_pareto_marginal(4.0, 0.5), std::invalid_argument);
  MarginalPtr p = smoothed_symmetric_pareto_marginal(5.0, 0.5);

  // symmetry of the density and antisymmetry of the quantile
  for (double x : {0.2, 0.9, 2.5}) CHECK(p->pdf(x) == doctest::Approx(p->pdf(-x)).epsilon(1e-12));
  for (double y : {0.05, 0.2, 0.4})
    CHECK(p->quantile(y) == doctest::Approx(-p->quantile(1 - y)).epsilon(1e-8));

  // density integrates to one
  double mass = adaptive_simpson([&](double x) { return p->pdf(x); }, -60.0, 60.0, 1e-9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

  // tail exponent of f(Q(y)) ~ y^{gamma} with gamma = (1 + alpha)/alpha
  double expected_gamma = (1.0 + 5.0) / 5.0;
  CHECK(p->gamma0() == doctest::Approx(expected_gamma).epsilon(1e-12));
  double y1 = 1e-4, y2 = 1e-5;
  double ratio = std::log(p->density_quantile(y1) / p->density_quantile(y2)) /
                 std::log(y1 / y2);
  CHECK(ratio == doctest::Approx(expected_gamma).epsilon(0.02));

  // closed-form variance matches numerical integration
  double var = adaptive_simpson([&](double x) { return x * x * p->pdf(x); }, -400.0, 400.0,
                                1e-10);
  CHECK(smoothed_pareto_variance(5.0, 0.5) == doctest::Approx(var).epsilon(1e-6));
}

TEST_CASE("condition report classifies the families") {
  ConditionReport g = condition_report(*gaussian_marginal(1.0), 2);
  CHECK_FALSE(g.A);
  CHECK_FALSE(g.B);
  CHECK(g.C);
  CHECK(g.CsR3);
  CHECK(g.gamma == doctest::Approx(1.0));
  CHECK(g.c_sup > 0.0);

  ConditionReport l = condition_report(*logistic_marginal(1.0), 2);
  CHECK(l.A);
  CHECK(l.C);
  // |f'(Q)/f(Q)| sqrt(y(1-y)) stays bounded for the logistic law
  CHECK_FALSE(l.c_divergent);
  CHECK(l.c_sup <= 1.0 + 1e-9);
}

TEST_CASE("oracle marginal approximates the stationary law") {
  CoefficientSpec spec;
  spec.beta = 0.9;  // fast decay keeps the simulation window small
  spec.truncation_eps = 1e-2;
  spec.normalize_unit_variance = true;
  InnovationSpec inn;  // standard normal, so the stationary law is N(0,1)
  const Eigen::Index m = 100000;
  auto oracle = oracle_marginal_from_simulation(spec, inn, m, 77);
  REQUIRE(oracle->sample_size() == m);

  const double dkw = 2.0 / std::sqrt(static_cast<double>(m));
  for (double x : {-1.5, -0.5, 0.0, 0.5, 1.5})
    CHECK(std::abs(oracle->cdf(x) - normal_cdf(x)) <= dkw);
  for (double y : {0.1, 0.3, 0.5, 0.7, 0.9})
    CHECK(std::abs(normal_cdf(oracle->quantile(y)) - y) <= dkw + 1e-3);
  // kernel density at the median within 5%
  CHECK(oracle->density_quantile(0.5) ==
        doctest::Approx(0.3989422804014327).epsilon(0.05));
}
