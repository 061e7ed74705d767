#include "rpdcov/special.hpp"
#include "rpdcov/types.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>

using rpdcov::GammaParams;

TEST_CASE("incomplete gamma against Boost.Math") {
  for (double a : {0.05, 0.5, 1.0, 2.5, 10.0, 57.3, 400.0, 5000.0}) {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 7.5, 30.0, 120.0, 800.0, 6000.0}) {
      const double ref = boost::math::gamma_p(a, x);
      CHECK(std::fabs(rpdcov::regularized_gamma_p(a, x) - ref) <= 1e-13);
      CHECK(std::fabs(rpdcov::regularized_gamma_q(a, x) - boost::math::gamma_q(a, x)) <= 1e-13);
    }
  }
  CHECK(rpdcov::regularized_gamma_p(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(rpdcov::regularized_gamma_p(0.0, 1.0), rpdcov::DomainError);
  CHECK_THROWS_AS(rpdcov::regularized_gamma_p(1.0, -1.0), rpdcov::DomainError);
}

TEST_CASE("gamma quantile closed forms") {
  CHECK(std::fabs(rpdcov::gamma_quantile(GammaParams{1.0, 1.0}, 0.95) - 2.9957322735539895) <= 1e-9);
  CHECK(std::fabs(rpdcov::gamma_quantile(GammaParams{0.5, 0.5}, 0.95) - 3.841458820694124) <= 1e-9);
  CHECK(std::fabs(rpdcov::chi_squared_quantile(1.0, 0.95) - 3.841458820694124) <= 1e-9);
  for (double p : {0.01, 0.5, 0.9, 0.999}) {
    CHECK(rpdcov::gamma_quantile(GammaParams{1.0, 1.0}, p) == doctest::Approx(-std::log1p(-p)).epsilon(1e-10));
  }
}

TEST_CASE("gamma quantile inverts the distribution") {
  for (double a : {0.02, 0.3, 1.0, 4.0, 37.0, 900.0, 20000.0}) {
    for (double p : {1e-6, 0.05, 0.5, 0.95, 0.999999}) {
      const double q = rpdcov::gamma_quantile(GammaParams{a, 1.0}, p);
      CHECK(std::fabs(rpdcov::regularized_gamma_p(a, q) - p) <= 1e-10);
      CHECK(q == doctest::Approx(boost::math::gamma_p_inv(a, p)).epsilon(1e-8));
      for (double rate : {0.01, 3.0}) {
        CHECK(rpdcov::gamma_quantile(GammaParams{a, rate}, p) == doctest::Approx(q / rate).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gamma quantile rejects invalid arguments") {
  CHECK_THROWS_AS(rpdcov::gamma_quantile(GammaParams{0.0, 1.0}, 0.5), rpdcov::DomainError);
  CHECK_THROWS_AS(rpdcov::gamma_quantile(GammaParams{1.0, -1.0}, 0.5), rpdcov::DomainError);
  CHECK_THROWS_AS(rpdcov::gamma_quantile(GammaParams{1.0, 1.0}, 0.0), rpdcov::DomainError);
  CHECK_THROWS_AS(rpdcov::gamma_quantile(GammaParams{1.0, 1.0}, 1.0), rpdcov::DomainError);
}
