#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "../oracle.hpp"
#include "tavc/errors.hpp"
#include "tavc/processes.hpp"
#include "tavc/tuning.hpp"

using tavc::ProcessSpec;

TEST_CASE("autocov examples") {
  const std::vector<double> xs{1, 2, 3, 4};
  CHECK(tavc::autocov(xs, 0) == 1.25);
  CHECK(tavc::autocov(xs, 1) == 0.3125);
  CHECK(tavc::autocov(xs, 3) == -0.5625);
  CHECK(tavc::autocov(xs, -1) == tavc::autocov(xs, 1));
  CHECK_THROWS_AS(tavc::autocov(xs, 4), tavc::ParameterError);
}

TEST_CASE("autocov shift invariance") {
  const auto xs = tavc::generate(ProcessSpec::parse("ar1:phi=0.5,sd=1"), 3000, 2);
  auto shifted = xs;
  for (auto& x : shifted) x += 250.0;
  for (std::int64_t k : {0, 1, 5, 100, 2999}) {
    CHECK(tavc::autocov(shifted, k) == doctest::Approx(tavc::autocov(xs, k)).epsilon(1e-9));
  }
}

TEST_CASE("fft autocovariances match direct sums") {
  const auto xs = tavc::generate(ProcessSpec::parse("ar1:phi=0.7,sd=1,mean=3"), 1537, 6);
  const auto all = tavc::autocov_all(xs);
  REQUIRE(all.size() == xs.size());
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(xs.size()); ++k) {
    REQUIRE(std::fabs(all[static_cast<std::size_t>(k)] - oracle::autocov_direct(xs, k)) <= 1e-12 * all[0]);
  }
  const std::vector<double> small{1, 2, 3, 4};
  const auto g = tavc::autocov_all(small);
  CHECK(g[0] == doctest::Approx(1.25));
  CHECK(g[1] == doctest::Approx(0.3125));
  CHECK(g[3] == doctest::Approx(-0.5625));
}

TEST_CASE("windows") {
  CHECK(tavc::split_cosine_window(0.0) == 1.0);
  CHECK(tavc::split_cosine_window(0.79) == 1.0);
  CHECK(tavc::split_cosine_window(0.9) == doctest::Approx(0.5));
  CHECK(tavc::split_cosine_window(1.0) == doctest::Approx(0.0));
  CHECK(tavc::split_cosine_window(-1.5) == 0.0);
  CHECK(tavc::tukey_hanning_window(0.0) == 1.0);
  CHECK(tavc::tukey_hanning_window(0.5) == doctest::Approx(0.5));
  CHECK(tavc::tukey_hanning_window(-0.5) == doctest::Approx(0.5));
  CHECK(tavc::tukey_hanning_window(1.2) == 0.0);
}

TEST_CASE("block length matches the direct reimplementation") {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const char* p : {"ar1:phi=0.5,sd=1", "iid:sd=1", "ma1:b=0.8"}) {
      const auto xs = tavc::generate(ProcessSpec::parse(p), 2000, seed);
      CHECK(tavc::bk_block_length(xs).l_hat == oracle::bk_block_length_direct(xs));
    }
  }
}

TEST_CASE("block length ranges") {
  const auto ar = tavc::generate(ProcessSpec::parse("ar1:phi=0.5,sd=1"), 10000, 42);
  const auto r = tavc::bk_block_length(ar);
  CHECK(r.l_hat >= 15);
  CHECK(r.l_hat <= 60);
  CHECK(r.n == 10000);
  CHECK(r.lambda_hat == doctest::Approx(r.l_hat / std::cbrt(10000.0)));
  CHECK(r.c_hat == doctest::Approx(std::pow(4.0 * r.lambda_hat / 3.0, 1.5)));
  CHECK(tavc::c_hat_from_pilot(ar) == r.c_hat);

  const auto iid = tavc::generate(ProcessSpec::parse("iid:sd=1"), 10000, 42);
  const auto ri = tavc::bk_block_length(iid);
  CHECK(ri.l_hat >= 1);
  CHECK(ri.l_hat <= 8);
}

TEST_CASE("block length invariances") {
  const auto xs = tavc::generate(ProcessSpec::parse("ar1:phi=0.5,sd=1"), 5000, 17);
  const auto base = tavc::bk_block_length(xs);
  auto shifted = xs;
  for (auto& x : shifted) x += 100.0;
  auto scaled = xs;
  for (auto& x : scaled) x *= 7.3;
  const auto s = tavc::bk_block_length(shifted);
  const auto c = tavc::bk_block_length(scaled);
  CHECK(std::fabs(s.b_hat - base.b_hat) <= 1e-8 * base.b_hat);
  CHECK(std::fabs(c.b_hat - base.b_hat) <= 1e-8 * base.b_hat);
  CHECK(s.l_hat == base.l_hat);
  CHECK(c.l_hat == base.l_hat);
}

TEST_CASE("degenerate tuning inputs") {
  CHECK_THROWS_AS(tavc::bk_block_length(std::vector<double>(100, 5.0)), tavc::DegenerateSeries);
  CHECK_THROWS_AS(tavc::bk_block_length(std::vector<double>(10, 1.0)), tavc::ParameterError);
}

TEST_CASE("c from block length") {
  CHECK(tavc::c_from_block_length(29, 10000) == doctest::Approx(2.404).epsilon(1e-3));
  CHECK(tavc::c_from_block_length(100, 1000000) == doctest::Approx(1.5396).epsilon(1e-4));
}

TEST_CASE("theta of covariances") {
  std::vector<double> ar(200);
  for (std::size_t k = 0; k < ar.size(); ++k) ar[k] = std::pow(0.5, static_cast<double>(k + 1)) / 0.75;
  CHECK(std::fabs(tavc::theta_of_covs(ar) + 16.0 / 3.0) <= 1e-6);
  CHECK(tavc::theta_of_covs(std::vector<double>(50, 0.0)) == 0.0);
  CHECK(tavc::theta_of_covs(std::vector<double>{0.5, 0.0, 0.0}) == -1.0);
}

TEST_CASE("c star") {
  CHECK(tavc::c_star(-16.0 / 3.0, 4.0) == doctest::Approx(16.0 * std::sqrt(2.0) / 9.0));
  CHECK(tavc::c_star(-16.0 / 3.0, 4.0) == doctest::Approx(2.5142).epsilon(1e-4));
  CHECK(tavc::c_star(0.0, 2.0) == 0.0);
  CHECK(tavc::c_star(-3.0, 1.0) == doctest::Approx(5.6569).epsilon(1e-4));
  CHECK_THROWS_AS(tavc::c_star(1.0, 0.0), tavc::ParameterError);
}

TEST_CASE("optimal p") {
  CHECK(tavc::optimal_p(1.0, 4.0) == 1.5);
  CHECK(tavc::optimal_p(1.0, std::numeric_limits<double>::infinity()) == 3.0);
  CHECK(tavc::optimal_p(0.5, 4.0) == 2.0);
  CHECK_THROWS_AS(tavc::optimal_p(0.1, 5.0), tavc::ParameterError);
  CHECK_THROWS_AS(tavc::optimal_p(0.2, 100.0), tavc::ParameterError);
}

TEST_CASE("block length concentrates near the optimum [slow]") {
  // lambda* n^{1/3} with lambda*^3 = 3 theta^2 / (2 sigma^4), theta = -16/3, sigma^2 = 4.
  const double target = std::cbrt(8.0 / 3.0) * std::cbrt(1e5);
  const auto spec = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  std::vector<double> ls;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ls.push_back(static_cast<double>(tavc::bk_block_length(tavc::generate(spec, 100000, seed)).l_hat));
  }
  std::nth_element(ls.begin(), ls.begin() + 25, ls.end());
  const double median = ls[25];
  CHECK(median >= 0.65 * target);
  CHECK(median <= 1.35 * target);
}
