#include <doctest.h>

#include <cmath>

#include "../oracle.hpp"
#include "tavc/errors.hpp"
#include "tavc/normal.hpp"

TEST_CASE("quantile matches bisection oracle") {
  for (double p : {1e-12, 1e-8, 1e-4, 0.001, 0.01, 0.02425, 0.05, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.95, 0.975,
                   0.99, 0.999, 0.97575, 1 - 1e-6, 1 - 1e-10}) {
    CHECK(std::fabs(tavc::normal_quantile(p) - oracle::normal_quantile_bisect(p)) <= 1e-8);
  }
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    REQUIRE(std::fabs(tavc::normal_quantile(p) - oracle::normal_quantile_bisect(p)) <= 1e-8);
  }
}

TEST_CASE("known quantiles") {
  CHECK(tavc::normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(tavc::normal_quantile(0.5) == 0.0);
  CHECK(tavc::normal_quantile(0.025) == doctest::Approx(-tavc::normal_quantile(0.975)).epsilon(1e-14));
  CHECK(tavc::normal_cdf(tavc::normal_quantile(0.8)) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("quantile domain") {
  CHECK_THROWS_AS(tavc::normal_quantile(0.0), tavc::ParameterError);
  CHECK_THROWS_AS(tavc::normal_quantile(1.0), tavc::ParameterError);
  CHECK_THROWS_AS(tavc::normal_quantile(std::nan("")), tavc::ParameterError);
}
