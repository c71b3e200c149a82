#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tavc/estimator.hpp"
#include "tavc/processes.hpp"
#include "tavc/schedule.hpp"

namespace tavc {

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Work items must not share mutable state; results written to
// slot i are therefore independent of the thread count.
void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& fn);

// Stream id of replication `rep` at grid point `point`.
inline std::uint64_t replication_stream(std::uint64_t point, std::uint64_t rep) { return (point << 32) ^ rep; }

// ---------------------------------------------------------------------------
// Stream estimation

struct EstimateOptions {
  BlockSchedule schedule = BlockSchedule::power_law(1.0, 1.5);
  MeanMode mode = MeanMode::unknown_mean();
  std::int64_t emit_every = 0;  // 0: one row after the last sample
  double alpha = 0.05;
  CiForm ci_form = CiForm::kSqrtN;
  std::optional<double> theta;  // adds the f_hat column
};

struct EstimateSummary {
  std::int64_t rows = 0;
  std::int64_t samples = 0;
  RecursiveEstimator final_state;
};

// Reads one decimal float per line (blank lines skipped) and writes
// "n,mean,sigma2_hat,ci_lo,ci_hi[,f_hat]" rows every emit_every samples.
// With a resume state the recursion continues from it.
// Throws ParameterError naming the line number on malformed input.
EstimateSummary run_estimate(std::istream& in, std::ostream& out, const EstimateOptions& opts,
                             std::optional<RecursiveEstimator> resume = std::nullopt);

// ---------------------------------------------------------------------------
// MSE sweep

struct ExperimentConfig {
  ProcessSpec process;
  BlockSchedule schedule = BlockSchedule::power_law(1.0, 1.5);
  bool known_mean = true;
  std::vector<std::int64_t> n_grid;
  std::int64_t replications = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct SweepRow {
  std::int64_t n = 0;
  std::int64_t replications = 0;
  double mean_estimate = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  std::optional<double> se_of_mse;       // absent for a single replication
  std::optional<double> constant_ratio;  // mse n^{2/3} / optimal-c MSE constant
};

struct ReplicationRecord {
  std::int64_t n = 0;
  std::int64_t replication = 0;
  double estimate = 0.0;
  double sq_error = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> slope;  // least-squares slope of log mse on log n
  std::vector<ReplicationRecord> log;
};

// Asymptotic MSE constant of V_n/v_n at the optimal c with p = 3/2:
// 2^{14/3} 3^{-5/3} |theta|^{2/3} sigma^{8/3}.
double optimal_mse_constant(double theta, double sigma2);

// Least-squares slope of log(y) on log(x). Needs two or more points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Independent chains per grid point; empirical MSE against true_tavc.
// Throws ParameterError if the process has no known sigma^2 (or mean, when
// known_mean) or the grid is not strictly increasing.
SweepResult mse_sweep(const ExperimentConfig& config, bool keep_log = false);

// Recomputes each row's mse from the per-replication log; returns the largest
// relative discrepancy.
double audit_sweep(const std::vector<SweepRow>& rows, const std::vector<ReplicationRecord>& log);

// ---------------------------------------------------------------------------
// Recursive vs. batched-means efficiency

struct RatioConfig {
  ProcessSpec process;
  std::int64_t n = 1 << 20;
  std::int64_t replications = 300;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct RatioResult {
  double ratio = 0.0;  // rmse_recursive / rmse_batched
  double rmse_recursive = 0.0;
  double rmse_batched = 0.0;
  double c = 0.0;
  std::int64_t batch_length = 0;
  std::int64_t replications = 0;
  bool low_replication = false;
};

inline constexpr std::int64_t kLowReplicationThreshold = 30;

// Paired replications of V_n/v_n (c = c*, p = 3/2, known mean) and the
// overlapping batched-means estimate with the MSE-optimal batch length, both
// centred at the true mean. Refuses processes with unknown or zero theta.
RatioResult ratio_experiment(const RatioConfig& config);

// ---------------------------------------------------------------------------
// Geometric-schedule divergence

struct DivergenceConfig {
  int max_exponent = 20;
  std::int64_t replications = 500;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double control_c = 1.0;  // power-law control, p = 3/2
};

struct DivergenceRow {
  int exponent = 0;
  std::int64_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct DivergenceReport {
  std::vector<DivergenceRow> rows;  // geometric schedule, r = 2
  double control_mean = 0.0;        // power-law control at the largest n
  double control_sd = 0.0;
  std::optional<bool> non_decay_confirmed;  // sd at the largest n >= 0.5
  std::string warning;
};

inline constexpr double kDivergenceSdFloor = 0.5;

// i.i.d. N(0,1) data, known mean 0; V_n/v_n at n = 2^m for m = 10..max
// (all m when max < 10) across replications. The same streams feed the
// power-law control.
DivergenceReport divergence_demo(const DivergenceConfig& config);

// ---------------------------------------------------------------------------
// Fixed-width sequential stopping

struct StopConfig {
  ProcessSpec process;
  BlockSchedule schedule = BlockSchedule::power_law(1.0, 1.5);
  double alpha = 0.05;
  double half_width_target = 0.05;
  std::int64_t n_min = 1000;
  std::int64_t n_max = 100'000'000;
  std::int64_t replications = 1;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct StopOutcome {
  std::int64_t n = 0;
  double mean = 0.0;
  double sigma2_hat = 0.0;
  double half_width = 0.0;
  bool converged = false;
  std::optional<bool> covered;
};

struct StopReport {
  std::vector<StopOutcome> runs;
  std::optional<double> coverage;  // over converged runs, when the mean is known
  double converged_fraction = 0.0;
  double mean_stopping_n = 0.0;
};

// Streams each replication (unknown mean) until the CI half-width
// z sigma_hat / sqrt(n) <= target, checked at every n >= n_min, or n_max.
StopReport sequential_stop(const StopConfig& config);

// Same rule applied to an external stream (one replication).
StopOutcome sequential_stop_stream(std::istream& in, const StopConfig& config);

// ---------------------------------------------------------------------------
// Multiple chains

struct MultichainConfig {
  ProcessSpec process;
  BlockSchedule schedule = BlockSchedule::power_law(1.0, 1.5);
  std::int64_t chains = 100;
  std::int64_t n = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct MultichainReport {
  std::vector<double> estimates;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
};

// Independent chains, unknown mean. Quartiles by linear interpolation
// between order statistics.
MultichainReport multichain(const MultichainConfig& config);

// Linear-interpolation quantile of an unsorted sample, prob in [0, 1].
double sample_quantile(std::vector<double> xs, double prob);

}  // namespace tavc
