#include "tavc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "kv.hpp"
#include "tavc/csv.hpp"
#include "tavc/errors.hpp"
#include "tavc/normal.hpp"
#include "tavc/reference.hpp"
#include "tavc/spectral.hpp"
#include "tavc/tuning.hpp"

namespace tavc {

void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, count));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

namespace {

// Parses one input line; returns false for blank lines.
bool parse_stream_line(const std::string& line, std::int64_t line_no, double& x) {
  const std::string_view s = detail::trim(line);
  if (s.empty()) return false;
  if (!detail::parse_double(s, x) || !std::isfinite(x)) {
    throw ParameterError("line " + std::to_string(line_no) + ": not a finite decimal number: '" + std::string(s) + "'");
  }
  return true;
}

}  // namespace

EstimateSummary run_estimate(std::istream& in, std::ostream& out, const EstimateOptions& opts,
                             std::optional<RecursiveEstimator> resume) {
  if (opts.emit_every < 0) throw ParameterError("emit-every must be >= 0");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  EstimateSummary summary{0, 0, resume ? *resume : RecursiveEstimator(opts.schedule, opts.mode)};
  RecursiveEstimator& est = summary.final_state;
  std::optional<SpectralEstimator> spectral;
  if (opts.theta) {
    if (est.n() != 0) throw ParameterError("--theta cannot be combined with a resumed checkpoint");
    spectral.emplace(opts.schedule, *opts.theta);
  }
  const double centre = opts.mode.known ? opts.mode.mu : 0.0;

  std::vector<std::string> columns{"n", "mean", "sigma2_hat", "ci_lo", "ci_hi"};
  if (spectral) columns.emplace_back("f_hat");
  CsvWriter csv(out, columns);

  auto emit = [&] {
    const TavcEstimate e = est.tavc();
    std::optional<double> lo;
    std::optional<double> hi;
    if (est.n() >= 2) {
      const Interval ci = est.confidence_interval(opts.alpha, opts.ci_form);
      lo = ci.lo;
      hi = ci.hi;
    }
    csv.cell(est.n()).cell(est.mean()).cell(e.sigma2_hat).cell(lo).cell(hi);
    if (spectral) csv.cell(spectral->density());
    csv.end_row();
    ++summary.rows;
  };

  std::string line;
  std::int64_t line_no = 0;
  bool pending = false;
  while (std::getline(in, line)) {
    ++line_no;
    double x = 0.0;
    if (!parse_stream_line(line, line_no, x)) continue;
    est.update(x);
    if (spectral) spectral->update(x - centre);
    ++summary.samples;
    pending = true;
    if (opts.emit_every > 0 && est.n() % opts.emit_every == 0) {
      emit();
      pending = false;
    }
  }
  if (opts.emit_every == 0 && pending) emit();
  return summary;
}

// ---------------------------------------------------------------------------

double optimal_mse_constant(double theta, double sigma2) {
  return std::pow(2.0, 14.0 / 3.0) / std::pow(3.0, 5.0 / 3.0) * std::pow(std::fabs(theta), 2.0 / 3.0) *
         std::pow(sigma2, 4.0 / 3.0);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope: need two or more paired points");
  double mx = 0.0;
  double my = 0.0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

void check_grid(const std::vector<std::int64_t>& grid) {
  if (grid.empty()) throw ParameterError("n grid is empty");
  if (grid.front() < 1) throw ParameterError("n grid entries must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw ParameterError("n grid must be strictly increasing");
  }
}

struct MomentSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 for a single value
};

MomentSummary summarize(const std::vector<double>& xs) {
  MomentSummary s;
  if (xs.empty()) return s;
  long double acc = 0.0L;
  for (double x : xs) acc += x;
  s.mean = static_cast<double>(acc / static_cast<long double>(xs.size()));
  if (xs.size() > 1) {
    long double ss = 0.0L;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1)));
  }
  return s;
}

bool is_optimal_c(const BlockSchedule& schedule, double theta, double sigma2) {
  if (schedule.kind() != BlockSchedule::Kind::kPowerLaw || theta == 0.0) return false;
  const double cs = c_star(theta, sigma2);
  return std::fabs(schedule.p() - 1.5) < 1e-12 && std::fabs(schedule.c() - cs) <= 1e-9 * cs;
}

}  // namespace

SweepResult mse_sweep(const ExperimentConfig& config, bool keep_log) {
  check_grid(config.n_grid);
  if (config.replications < 1) throw ParameterError("replications must be >= 1");
  const auto sigma2 = true_tavc(config.process);
  if (!sigma2) {
    throw ParameterError("sweep: process " + config.process.describe() +
                         " has no closed-form sigma^2, so the MSE cannot be computed");
  }
  const auto mu = true_mean(config.process);
  if (config.known_mean && !mu) throw ParameterError("sweep: known-mean mode needs the process mean");
  const MeanMode mode = config.known_mean ? MeanMode::known_mean(*mu) : MeanMode::unknown_mean();
  const auto theta = true_theta(config.process);
  const bool report_constant = theta && is_optimal_c(config.schedule, *theta, *sigma2);

  SweepResult result;
  const std::int64_t reps = config.replications;
  const auto points = static_cast<std::int64_t>(config.n_grid.size());
  std::vector<double> estimates(static_cast<std::size_t>(points * reps));
  parallel_for(points * reps, config.threads, [&](std::int64_t job) {
    const std::int64_t point = job / reps;
    const std::int64_t rep = job % reps;
    const std::int64_t n = config.n_grid[static_cast<std::size_t>(point)];
    ProcessStream stream(config.process, config.seed,
                         replication_stream(static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(rep)));
    RecursiveEstimator est(config.schedule, mode);
    for (std::int64_t i = 0; i < n; ++i) est.update(stream.next());
    estimates[static_cast<std::size_t>(job)] = est.tavc().sigma2_hat;
  });

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::int64_t point = 0; point < points; ++point) {
    const std::int64_t n = config.n_grid[static_cast<std::size_t>(point)];
    std::vector<double> sq(static_cast<std::size_t>(reps));
    std::vector<double> est(static_cast<std::size_t>(reps));
    for (std::int64_t rep = 0; rep < reps; ++rep) {
      const double e = estimates[static_cast<std::size_t>(point * reps + rep)];
      est[static_cast<std::size_t>(rep)] = e;
      sq[static_cast<std::size_t>(rep)] = (e - *sigma2) * (e - *sigma2);
      if (keep_log) result.log.push_back({n, rep, e, sq[static_cast<std::size_t>(rep)]});
    }
    const MomentSummary e = summarize(est);
    const MomentSummary s = summarize(sq);
    SweepRow row;
    row.n = n;
    row.replications = reps;
    row.mean_estimate = e.mean;
    row.mse = s.mean;
    row.rmse = std::sqrt(s.mean);
    if (reps > 1) row.se_of_mse = s.sd / std::sqrt(static_cast<double>(reps));
    if (report_constant) {
      row.constant_ratio = row.mse * std::pow(static_cast<double>(n), 2.0 / 3.0) / optimal_mse_constant(*theta, *sigma2);
    }
    if (row.mse > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(row.mse);
    }
    result.rows.push_back(row);
  }
  if (xs.size() >= 2) result.slope = loglog_slope(xs, ys);
  return result;
}

double audit_sweep(const std::vector<SweepRow>& rows, const std::vector<ReplicationRecord>& log) {
  double worst = 0.0;
  for (const SweepRow& row : rows) {
    long double acc = 0.0L;
    std::int64_t count = 0;
    for (const auto& rec : log) {
      if (rec.n != row.n) continue;
      acc += rec.sq_error;
      ++count;
    }
    if (count != row.replications) return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(acc / static_cast<long double>(count));
    const double scale = std::max(std::fabs(row.mse), std::numeric_limits<double>::min());
    worst = std::max(worst, std::fabs(mse - row.mse) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

RatioResult ratio_experiment(const RatioConfig& config) {
  if (config.replications < 1) throw ParameterError("replications must be >= 1");
  if (config.n < 2) throw ParameterError("ratio: n must be >= 2");
  const auto sigma2 = true_tavc(config.process);
  const auto theta = true_theta(config.process);
  const auto mu = true_mean(config.process);
  if (!sigma2 || !theta || !mu) {
    throw ParameterError("ratio: process " + config.process.describe() + " lacks closed-form sigma^2/theta");
  }
  if (*theta == 0.0) {
    throw ParameterError("ratio: theta = 0, the optimal batch length degenerates and the comparison is undefined");
  }

  RatioResult r;
  r.c = c_star(*theta, *sigma2);
  r.batch_length = optimal_batch_length(*theta, *sigma2, config.n);
  r.replications = config.replications;
  r.low_replication = config.replications < kLowReplicationThreshold;
  const BlockSchedule schedule = BlockSchedule::power_law(r.c, 1.5);

  std::vector<double> err_rec(static_cast<std::size_t>(config.replications));
  std::vector<double> err_bm(static_cast<std::size_t>(config.replications));
  parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
    const std::vector<double> xs = generate(config.process, config.n, config.seed, static_cast<std::uint64_t>(rep));
    RecursiveEstimator est(schedule, MeanMode::known_mean(*mu));
    for (double x : xs) est.update(x);
    const double rec = est.tavc().sigma2_hat;
    const double bm = batched_means_tavc(xs, BatchSpec{r.batch_length, true}, *mu);
    err_rec[static_cast<std::size_t>(rep)] = (rec - *sigma2) * (rec - *sigma2);
    err_bm[static_cast<std::size_t>(rep)] = (bm - *sigma2) * (bm - *sigma2);
  });
  r.rmse_recursive = std::sqrt(summarize(err_rec).mean);
  r.rmse_batched = std::sqrt(summarize(err_bm).mean);
  r.ratio = r.rmse_recursive / r.rmse_batched;
  return r;
}

// ---------------------------------------------------------------------------

DivergenceReport divergence_demo(const DivergenceConfig& config) {
  if (config.max_exponent < 1 || config.max_exponent > 40) throw ParameterError("diverge: exponent must be in [1, 40]");
  if (config.replications < 1) throw ParameterError("replications must be >= 1");
  const int lo = std::min(10, config.max_exponent);
  const int count = config.max_exponent - lo + 1;
  const std::int64_t n_max = std::int64_t{1} << config.max_exponent;
  const ProcessSpec iid{IidNormal{0.0, 1.0}};
  const BlockSchedule geom = BlockSchedule::geometric(2);
  const BlockSchedule control = BlockSchedule::power_law(config.control_c, 1.5);

  const auto reps = config.replications;
  std::vector<double> ratios(static_cast<std::size_t>(reps * count));
  std::vector<double> control_vals(static_cast<std::size_t>(reps));
  parallel_for(reps, config.threads, [&](std::int64_t rep) {
    ProcessStream stream(iid, config.seed, static_cast<std::uint64_t>(rep));
    RecursiveEstimator g(geom, MeanMode::known_mean(0.0));
    RecursiveEstimator p(control, MeanMode::known_mean(0.0));
    std::int64_t next_check = std::int64_t{1} << lo;
    int slot = 0;
    for (std::int64_t i = 1; i <= n_max; ++i) {
      const double x = stream.next();
      g.update(x);
      p.update(x);
      if (i == next_check) {
        ratios[static_cast<std::size_t>(rep * count + slot)] = g.tavc().sigma2_hat;
        ++slot;
        next_check <<= 1;
      }
    }
    control_vals[static_cast<std::size_t>(rep)] = p.tavc().sigma2_hat;
  });

  DivergenceReport report;
  for (int s = 0; s < count; ++s) {
    std::vector<double> col(static_cast<std::size_t>(reps));
    for (std::int64_t rep = 0; rep < reps; ++rep) col[static_cast<std::size_t>(rep)] = ratios[static_cast<std::size_t>(rep * count + s)];
    const MomentSummary m = summarize(col);
    report.rows.push_back({lo + s, std::int64_t{1} << (lo + s), m.mean, m.sd});
  }
  const MomentSummary c = summarize(control_vals);
  report.control_mean = c.mean;
  report.control_sd = c.sd;
  if (reps < 3) {
    report.warning = "too few replications to judge dispersion; non-decay check skipped";
  } else {
    report.non_decay_confirmed = report.rows.back().sd >= kDivergenceSdFloor;
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

void check_stop_config(const StopConfig& config) {
  if (!(config.half_width_target > 0.0)) throw ParameterError("stop: half-width target must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ParameterError("stop: alpha must lie in (0, 1)");
  const std::int64_t a2 = config.schedule.boundary(2);
  if (config.n_min < std::max<std::int64_t>(a2, 2)) {
    throw ParameterError("stop: n_min must be >= a_2 = " + std::to_string(a2) + " (and >= 2)");
  }
  if (config.n_max < config.n_min) throw ParameterError("stop: n_max must be >= n_min");
}

// Feeds one value; returns true once the rule fires.
bool stop_step(RecursiveEstimator& est, double x, const StopConfig& config, double z, StopOutcome& out) {
  est.update(x);
  if (est.n() < config.n_min) return false;
  const double half = z * std::sqrt(est.tavc().sigma2_hat / static_cast<double>(est.n()));
  if (half <= config.half_width_target || est.n() >= config.n_max) {
    out.n = est.n();
    out.mean = est.mean();
    out.sigma2_hat = est.tavc().sigma2_hat;
    out.half_width = half;
    out.converged = half <= config.half_width_target;
    return true;
  }
  return false;
}

}  // namespace

StopReport sequential_stop(const StopConfig& config) {
  check_stop_config(config);
  if (config.replications < 1) throw ParameterError("replications must be >= 1");
  const double z = normal_quantile(1.0 - config.alpha / 2.0);
  const auto mu = true_mean(config.process);

  StopReport report;
  report.runs.resize(static_cast<std::size_t>(config.replications));
  parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
    ProcessStream stream(config.process, config.seed, static_cast<std::uint64_t>(rep));
    RecursiveEstimator est(config.schedule, MeanMode::unknown_mean());
    StopOutcome& out = report.runs[static_cast<std::size_t>(rep)];
    while (!stop_step(est, stream.next(), config, z, out)) {
    }
    if (mu) out.covered = std::fabs(out.mean - *mu) <= out.half_width;
  });

  std::int64_t converged = 0;
  std::int64_t covered = 0;
  double total_n = 0.0;
  for (const auto& run : report.runs) {
    converged += run.converged ? 1 : 0;
    covered += (run.covered && *run.covered) ? 1 : 0;
    total_n += static_cast<double>(run.n);
  }
  const double reps = static_cast<double>(config.replications);
  report.converged_fraction = static_cast<double>(converged) / reps;
  report.mean_stopping_n = total_n / reps;
  if (mu) report.coverage = static_cast<double>(covered) / reps;
  return report;
}

StopOutcome sequential_stop_stream(std::istream& in, const StopConfig& config) {
  check_stop_config(config);
  const double z = normal_quantile(1.0 - config.alpha / 2.0);
  RecursiveEstimator est(config.schedule, MeanMode::unknown_mean());
  StopOutcome out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    double x = 0.0;
    if (!parse_stream_line(line, line_no, x)) continue;
    if (stop_step(est, x, config, z, out)) return out;
  }
  // Stream ended before the rule fired.
  out.n = est.n();
  if (est.n() > 0) {
    out.mean = est.mean();
    out.sigma2_hat = est.tavc().sigma2_hat;
    out.half_width = z * std::sqrt(out.sigma2_hat / static_cast<double>(est.n()));
  }
  out.converged = false;
  return out;
}

// ---------------------------------------------------------------------------

double sample_quantile(std::vector<double> xs, double prob) {
  if (xs.empty()) throw ParameterError("sample_quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ParameterError("sample_quantile: prob must be in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double h = prob * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

MultichainReport multichain(const MultichainConfig& config) {
  if (config.chains < 1) throw ParameterError("multichain: chains must be >= 1");
  if (config.n < 1) throw ParameterError("multichain: n must be >= 1");
  MultichainReport report;
  report.estimates.resize(static_cast<std::size_t>(config.chains));
  parallel_for(config.chains, config.threads, [&](std::int64_t chain) {
    ProcessStream stream(config.process, config.seed, static_cast<std::uint64_t>(chain));
    RecursiveEstimator est(config.schedule, MeanMode::unknown_mean());
    for (std::int64_t i = 0; i < config.n; ++i) est.update(stream.next());
    report.estimates[static_cast<std::size_t>(chain)] = est.tavc().sigma2_hat;
  });
  report.mean = summarize(report.estimates).mean;
  report.median = sample_quantile(report.estimates, 0.5);
  report.q1 = sample_quantile(report.estimates, 0.25);
  report.q3 = sample_quantile(report.estimates, 0.75);
  report.iqr = report.q3 - report.q1;
  return report;
}

}  // namespace tavc
