#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "tavc/errors.hpp"
#include "tavc/harness.hpp"
#include "tavc/reference.hpp"
#include "tavc/tuning.hpp"

using namespace tavc;

namespace {

ExperimentConfig small_sweep(unsigned threads) {
  ExperimentConfig cfg;
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.schedule = BlockSchedule::power_law(c_star(-16.0 / 3.0, 4.0), 1.5);
  cfg.n_grid = {1000, 4000, 16000};
  cfg.replications = 24;
  cfg.seed = 11;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

TEST_CASE("run_estimate example") {
  std::istringstream in("1\n2\n3\n4\n");
  std::ostringstream out;
  EstimateOptions opts;
  opts.schedule = BlockSchedule::power_law(1, 2);
  opts.emit_every = 4;
  const auto summary = run_estimate(in, out, opts);
  CHECK(summary.rows == 1);
  CHECK(summary.samples == 4);
  CHECK(summary.final_state.tavc().sigma2_hat == 10.75 / 7.0);
  const std::string text = out.str();
  CHECK(text.rfind("# tavc-csv v1\nn,mean,sigma2_hat,ci_lo,ci_hi\n4,2.5,1.5357142857142858,", 0) == 0);
}

TEST_CASE("run_estimate cadence and blanks") {
  std::istringstream in("1\n\n2\n3\n  4 \n5\n");
  std::ostringstream out;
  EstimateOptions opts;
  opts.emit_every = 2;
  const auto summary = run_estimate(in, out, opts);
  CHECK(summary.rows == 2);
  CHECK(summary.samples == 5);
  std::istringstream bad("1\n2\nabc\n");
  std::ostringstream sink;
  try {
    run_estimate(bad, sink, opts);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("run_estimate with one sample leaves the interval empty") {
  std::istringstream in("3\n");
  std::ostringstream out;
  run_estimate(in, out, EstimateOptions{});
  CHECK(out.str().find("\n1,3,0,,\n") != std::string::npos);
}

TEST_CASE("single replication sweep") {
  ExperimentConfig cfg;
  cfg.process = ProcessSpec::parse("iid:sd=1");
  cfg.n_grid = {100};
  cfg.replications = 1;
  const auto r = mse_sweep(cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].se_of_mse.has_value());
  CHECK_FALSE(r.slope.has_value());
  CHECK(r.rows[0].rmse == std::sqrt(r.rows[0].mse));
}

TEST_CASE("sweep refusals") {
  ExperimentConfig cfg;
  cfg.process = ProcessSpec::parse("linabs:rho=0.5");
  cfg.n_grid = {100};
  CHECK_THROWS_AS(mse_sweep(cfg), ParameterError);
  cfg.process = ProcessSpec::parse("iid:sd=1");
  cfg.n_grid = {100, 100};
  CHECK_THROWS_AS(mse_sweep(cfg), ParameterError);
}

TEST_CASE("sweep determinism, thread independence and audit") {
  const auto a = mse_sweep(small_sweep(1), true);
  const auto b = mse_sweep(small_sweep(3), true);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mse == b.rows[i].mse);
    CHECK(a.rows[i].mean_estimate == b.rows[i].mean_estimate);
    CHECK(a.rows[i].constant_ratio.has_value());
    CHECK(a.rows[i].mse >= 0.0);
  }
  CHECK(a.slope.has_value());
  CHECK(*a.slope == *b.slope);
  CHECK(a.log.size() == 72);
  CHECK(audit_sweep(a.rows, a.log) <= 1e-12);
  auto tampered = a.log;
  tampered[5].sq_error += 1.0;
  CHECK(audit_sweep(a.rows, tampered) > 1e-6);
}

TEST_CASE("iid sweep centres on 1 [slow]") {
  ExperimentConfig cfg;
  cfg.process = ProcessSpec::parse("iid:sd=1");
  cfg.schedule = BlockSchedule::power_law(2.0, 1.6);
  cfg.n_grid = {100000};
  cfg.replications = 200;
  const auto r = mse_sweep(cfg);
  CHECK(r.rows[0].mean_estimate == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mse constant and slope helpers") {
  CHECK(optimal_mse_constant(-16.0 / 3.0, 4.0) == doctest::Approx(78.889).epsilon(1e-4));
  CHECK(loglog_slope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), ParameterError);
}

TEST_CASE("ratio experiment guards") {
  RatioConfig cfg;
  cfg.process = ProcessSpec::parse("iid:sd=1");
  cfg.n = 1000;
  cfg.replications = 10;
  CHECK_THROWS_AS(ratio_experiment(cfg), ParameterError);
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.n = 20000;
  const auto r = ratio_experiment(cfg);
  CHECK(r.low_replication);
  CHECK(r.replications == 10);
  CHECK(r.batch_length == optimal_batch_length(-16.0 / 3.0, 4.0, 20000));
  CHECK(r.c == doctest::Approx(16.0 * std::sqrt(2.0) / 9.0));
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
}

TEST_CASE("divergence with two replications warns") {
  DivergenceConfig cfg;
  cfg.max_exponent = 12;
  cfg.replications = 2;
  const auto r = divergence_demo(cfg);
  CHECK(r.rows.size() == 3);
  CHECK(r.rows.front().n == 1024);
  CHECK_FALSE(r.non_decay_confirmed.has_value());
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("sequential stopping edge cases") {
  StopConfig cfg;
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.half_width_target = 100.0;
  cfg.replications = 3;
  const auto wide = sequential_stop(cfg);
  for (const auto& run : wide.runs) {
    CHECK(run.n == cfg.n_min);
    CHECK(run.converged);
  }
  cfg.process = ProcessSpec::parse("iid:sd=0,mean=2");
  cfg.half_width_target = 1e-9;
  const auto flat = sequential_stop(cfg);
  for (const auto& run : flat.runs) {
    CHECK(run.n == cfg.n_min);
    CHECK(run.half_width == 0.0);
    CHECK(run.mean == 2.0);
    CHECK(*run.covered);
  }
  CHECK(*flat.coverage == 1.0);
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.half_width_target = 1e-6;
  cfg.n_max = 5000;
  cfg.replications = 2;
  const auto capped = sequential_stop(cfg);
  CHECK(capped.converged_fraction == 0.0);
  CHECK(capped.runs[0].n == 5000);
  cfg.n_min = 1;
  CHECK_THROWS_AS(sequential_stop(cfg), ParameterError);
}

TEST_CASE("sequential stopping on a stream") {
  std::ostringstream data;
  for (const double x : generate(ProcessSpec::parse("iid:sd=1"), 3000, 4)) data << x << '\n';
  StopConfig cfg;
  cfg.half_width_target = 0.5;
  std::istringstream in(data.str());
  const auto out = sequential_stop_stream(in, cfg);
  CHECK(out.converged);
  CHECK(out.n == 1000);
  std::istringstream in2(data.str());
  cfg.half_width_target = 1e-4;
  const auto short_stream = sequential_stop_stream(in2, cfg);
  CHECK_FALSE(short_stream.converged);
  CHECK(short_stream.n == 3000);
}

TEST_CASE("multichain aggregates") {
  MultichainConfig cfg;
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.chains = 1;
  cfg.n = 5000;
  const auto one = multichain(cfg);
  CHECK(one.mean == one.estimates[0]);
  CHECK(one.median == one.estimates[0]);
  CHECK(one.iqr == 0.0);
  cfg.process = ProcessSpec::parse("iid:sd=0,mean=3");
  cfg.chains = 4;
  const auto flat = multichain(cfg);
  for (double e : flat.estimates) CHECK(e == 0.0);
  CHECK(flat.iqr == 0.0);
  CHECK(sample_quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(sample_quantile({4, 1, 3, 2}, 0.25) == 1.75);
}

TEST_CASE("multichain AR(1) median [slow]") {
  MultichainConfig cfg;
  cfg.process = ProcessSpec::parse("ar1:phi=0.5,sd=1");
  cfg.chains = 100;
  cfg.n = 100000;
  const auto r = multichain(cfg);
  CHECK(r.median == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::int64_t i) {
                    if (i == 7) throw ParameterError("boom");
                  }),
                  ParameterError);
}
