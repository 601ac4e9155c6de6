#include <cmath>

#include "doctest.h"
#include "lrdq/special.hpp"

using namespace lrdq;

TEST_CASE("normal quantile inverts normal cdf across the unit interval") {
  const double ys[] = {1e-12, 1e-6, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-6};
  for (double y : ys) {
    double z = normal_quantile(y);
    CHECK(normal_cdf(z) == doctest::Approx(y).epsilon(1e-10));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-12));
}

TEST_CASE("normal pdf and cdf reference values") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("beta function closed forms") {
  CHECK(beta_function(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(beta_function(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_function(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  // B(1/4, 1/2) = Gamma(1/4) Gamma(1/2) / Gamma(3/4)
  double expected = std::exp(std::lgamma(0.25) + std::lgamma(0.5) - std::lgamma(0.75));
  CHECK(beta_function(0.25, 0.5) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("tanh-sinh quadrature handles endpoint singularities") {
  // int_0^1 (y(1-y))^{-1/2} dy = pi
  auto f = [](double t, double omt) { return 1.0 / std::sqrt(t * omt); };
  QuadratureResult q = tanh_sinh_01(f);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(M_PI).epsilon(1e-11));

  // int_0^1 t^{-1/2} dt = 2
  auto g = [](double t, double) { return 1.0 / std::sqrt(t); };
  QuadratureResult q2 = tanh_sinh_01(g);
  CHECK(q2.converged);
  CHECK(q2.value == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("adaptive Simpson on smooth integrands") {
  double s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-10));
  double e = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(e == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));
}
