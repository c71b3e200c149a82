#include <doctest.h>

#include <cmath>
#include <vector>

#include "tavc/errors.hpp"
#include "tavc/processes.hpp"
#include "tavc/reference.hpp"

using tavc::BatchSpec;
using tavc::batched_means_tavc;

TEST_CASE("batched means on 1,2,3,4") {
  const std::vector<double> xs{1, 2, 3, 4};
  CHECK(batched_means_tavc(xs, {1, true}) == 1.25);
  CHECK(batched_means_tavc(xs, {2, true}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(batched_means_tavc(xs, {4, true}) == 0.0);
  // Disjoint batches (1,2),(3,4): means 1.5, 3.5 around 2.5 -> (2/2)(1+1).
  CHECK(batched_means_tavc(xs, {2, false}) == 2.0);
  // l = 3 drops the ragged tail: one batch (1,2,3), mean 2 -> 3 * 0.25.
  CHECK(batched_means_tavc(xs, {3, false}) == 0.75);
  CHECK(batched_means_tavc(xs, {1, true}, 0.0) == 7.5);
}

TEST_CASE("l = 1 is the population variance") {
  const auto xs = tavc::generate(tavc::ProcessSpec::parse("ar1:phi=0.3,sd=2,mean=1"), 5000, 3);
  long double m = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  long double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  s /= xs.size();
  CHECK(batched_means_tavc(xs, {1, true}) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
}

TEST_CASE("shift and scale") {
  const auto xs = tavc::generate(tavc::ProcessSpec::parse("ar1:phi=0.5,sd=1"), 20000, 8);
  for (bool overlap : {true, false}) {
    const BatchSpec spec{27, overlap};
    const double base = batched_means_tavc(xs, spec);
    auto shifted = xs;
    for (auto& x : shifted) x += 1000.0;
    CHECK(batched_means_tavc(shifted, spec) == doctest::Approx(base).epsilon(1e-9));
    auto scaled = xs;
    for (auto& x : scaled) x *= 4.0;
    CHECK(batched_means_tavc(scaled, spec) == doctest::Approx(16.0 * base).epsilon(1e-12));
  }
}

TEST_CASE("iid batched means near gamma(0) [slow]") {
  const auto spec = tavc::ProcessSpec::parse("iid:sd=1");
  double sum = 0;
  for (int r = 0; r < 500; ++r) sum += batched_means_tavc(tavc::generate(spec, 10000, 5, static_cast<std::uint64_t>(r)), {20, true});
  CHECK(sum / 500 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("optimal batch length") {
  CHECK(tavc::optimal_batch_length(0.0, 3.0, 100000) == 1);
  CHECK(tavc::optimal_batch_length(-16.0 / 3.0, 4.0, 10000) == 29);
  CHECK(tavc::optimal_batch_length(std::sqrt(2.0 / 3.0), 1.0, 1000003) == 100);
  CHECK_THROWS_AS(tavc::optimal_batch_length(1.0, 0.0, 100), tavc::ParameterError);
}

TEST_CASE("batch length bounds") {
  const std::vector<double> xs{1, 2, 3};
  CHECK_THROWS_AS(batched_means_tavc(xs, {0, true}), tavc::ParameterError);
  CHECK_THROWS_AS(batched_means_tavc(xs, {4, true}), tavc::ParameterError);
}
