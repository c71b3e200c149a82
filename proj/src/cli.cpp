#include "tavc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "kv.hpp"
#include "tavc/csv.hpp"
#include "tavc/errors.hpp"
#include "tavc/harness.hpp"
#include "tavc/reference.hpp"
#include "tavc/tuning.hpp"

namespace tavc {

namespace {

struct GlobalOptions {
  std::string schedule = "power:c=1,p=1.5";
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;
};

// Owns an optional file stream and hands out whichever stream is active.
class StreamChoice {
 public:
  StreamChoice(std::istream& fallback, const std::string& path) : in_(&fallback) {
    if (!path.empty() && path != "-") {
      file_in_ = std::make_unique<std::ifstream>(path);
      if (!*file_in_) throw ParameterError("cannot open input " + path);
      in_ = file_in_.get();
    }
  }
  StreamChoice(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_out_ = std::make_unique<std::ofstream>(path);
      if (!*file_out_) throw ParameterError("cannot open output " + path);
      out_ = file_out_.get();
    }
  }
  std::istream& in() { return *in_; }
  std::ostream& out() { return *out_; }

 private:
  std::istream* in_ = nullptr;
  std::ostream* out_ = nullptr;
  std::unique_ptr<std::ifstream> file_in_;
  std::unique_ptr<std::ofstream> file_out_;
};

std::vector<double> read_values(std::istream& in, std::int64_t limit) {
  std::vector<double> xs;
  std::string line;
  std::int64_t line_no = 0;
  while ((limit <= 0 || static_cast<std::int64_t>(xs.size()) < limit) && std::getline(in, line)) {
    ++line_no;
    const std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    double x = 0.0;
    if (!detail::parse_double(s, x) || !std::isfinite(x)) {
      throw ParameterError("line " + std::to_string(line_no) + ": not a finite decimal number: '" + std::string(s) + "'");
    }
    xs.push_back(x);
  }
  return xs;
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::int64_t v = 0;
    if (!detail::parse_int(item, v)) throw ParameterError("n grid: not an integer: '" + item + "'");
    grid.push_back(v);
  }
  return grid;
}

// power:c=cstar,... resolves c from the process' closed-form theta and sigma^2.
BlockSchedule resolve_schedule(const std::string& text, const std::optional<ProcessSpec>& process) {
  const auto parsed = detail::split_spec(text);
  auto it = parsed.args.find("c");
  if (parsed.kind == "power" && it != parsed.args.end() && it->second == "cstar") {
    if (!process) throw ParameterError("c=cstar needs --process");
    const auto theta = true_theta(*process);
    const auto sigma2 = true_tavc(*process);
    if (!theta || !sigma2 || *theta == 0.0) {
      throw ParameterError("c=cstar needs a process with closed-form, non-zero theta");
    }
    return BlockSchedule::power_law(c_star(*theta, *sigma2), detail::require_double(parsed, "p"));
  }
  return BlockSchedule::parse(text);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursive O(1)-memory estimation of time-average variance constants", "tavc"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--schedule", g.schedule, "power:c=<c>,p=<p> | geom:r=<r> | explicit:@<path>; c=cstar uses the process' optimal c")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Write CSV to this path instead of stdout");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Stream a series and report the running TAVC estimate")->fallthrough();
  std::string input;
  std::optional<double> mu;
  std::int64_t emit_every = 0;
  double alpha = 0.05;
  std::optional<double> theta;
  std::string checkpoint;
  std::string resume;
  std::string ci_form = "n";
  estimate->add_option("--input", input, "Input file (default stdin)");
  estimate->add_option("--mu", mu, "Known process mean; omit to estimate it");
  estimate->add_option("--emit-every", emit_every, "Emit a row every k samples (0 = final row only)");
  estimate->add_option("--alpha", alpha, "CI level alpha")->capture_default_str();
  estimate->add_option("--theta", theta, "Also estimate the spectral density at this frequency (radians)");
  estimate->add_option("--checkpoint", checkpoint, "Write the final state snapshot to this path");
  estimate->add_option("--resume", resume, "Continue from a snapshot written by --checkpoint");
  estimate->add_option("--ci-form", ci_form, "n: sqrt(n) interval; vn: sqrt(v_n) variant")
      ->check(CLI::IsMember({"n", "vn"}))
      ->capture_default_str();

  // reference
  auto* reference = app.add_subcommand("reference", "Batched-means TAVC estimate of a buffered series")->fallthrough();
  std::int64_t batch_l = 0;
  bool no_overlap = false;
  reference->add_option("--input", input, "Input file (default stdin)");
  reference->add_option("--l", batch_l, "Batch length")->required();
  reference->add_flag("--no-overlap", no_overlap, "Use disjoint batches");
  reference->add_option("--mu", mu, "Known mean used as the centre");

  // tune
  auto* tune = app.add_subcommand("tune", "Pilot block-length selection on a stream prefix")->fallthrough();
  std::int64_t pilot_n = 0;
  tune->add_option("--input", input, "Input file (default stdin)");
  tune->add_option("--pilot-n", pilot_n, "Use the first N values (0 = all)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Print a simulated series, one value per line")->fallthrough();
  std::string process_text;
  std::int64_t n = 0;
  std::uint64_t stream_id = 0;
  simulate->add_option("--process", process_text, "Process spec, e.g. ar1:phi=0.5,sd=1")->required();
  simulate->add_option("--n", n, "Number of values")->required();
  simulate->add_option("--stream", stream_id, "Replication stream id")->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "MSE of the recursive estimate over an n grid")->fallthrough();
  std::string mode_text = "known";
  std::string grid_text = "4096,16384,65536,262144,1048576";
  std::int64_t reps = 200;
  std::string audit_log;
  sweep->add_option("--process", process_text, "Process spec")->required();
  sweep->add_option("--mode", mode_text, "known | unknown mean")->check(CLI::IsMember({"known", "unknown"}))->capture_default_str();
  sweep->add_option("--n-grid", grid_text, "Comma-separated, strictly increasing")->capture_default_str();
  sweep->add_option("--reps", reps, "Replications per grid point")->capture_default_str();
  sweep->add_option("--audit-log", audit_log, "Persist per-replication errors here and re-check the MSE column");

  // ratio
  auto* ratio = app.add_subcommand("ratio", "RMSE of the recursive estimate relative to optimal batched means")->fallthrough();
  std::int64_t ratio_n = 1 << 20;
  ratio->add_option("--process", process_text, "Process spec")->required();
  ratio->add_option("--n", ratio_n, "Series length")->capture_default_str();
  ratio->add_option("--reps", reps, "Replications")->capture_default_str();

  // diverge
  auto* diverge = app.add_subcommand("diverge", "Dispersion of V_n/v_n under the geometric schedule a_k = 2^{k-1}")->fallthrough();
  int max_exp = 20;
  double control_c = 1.0;
  diverge->add_option("--max-exp", max_exp, "Largest exponent m (n = 2^m)")->capture_default_str();
  diverge->add_option("--reps", reps, "Replications")->capture_default_str();
  diverge->add_option("--control-c", control_c, "c of the power-law control (p = 3/2)")->capture_default_str();

  // stop
  auto* stop = app.add_subcommand("stop", "Fixed-width sequential stopping")->fallthrough();
  double target = 0.05;
  std::int64_t n_min = 1000;
  std::int64_t n_max = 100'000'000;
  stop->add_option("--process", process_text, "Simulate this process (otherwise read --input/stdin)");
  stop->add_option("--input", input, "Input file (default stdin)");
  stop->add_option("--alpha", alpha, "CI level alpha")->capture_default_str();
  stop->add_option("--target", target, "Half-width target")->capture_default_str();
  stop->add_option("--n-min", n_min, "First n at which the rule is checked")->capture_default_str();
  stop->add_option("--n-max", n_max, "Give up at this n")->capture_default_str();
  stop->add_option("--reps", reps, "Replications (simulated processes only)")->capture_default_str();

  // multichain
  auto* multi = app.add_subcommand("multichain", "Per-chain TAVC estimates and their spread")->fallthrough();
  std::int64_t chains = 100;
  std::int64_t chain_n = 100'000;
  multi->add_option("--process", process_text, "Process spec")->required();
  multi->add_option("--chains", chains, "Number of chains")->capture_default_str();
  multi->add_option("--n", chain_n, "Length of each chain")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    std::optional<ProcessSpec> process;
    if (!process_text.empty()) process = ProcessSpec::parse(process_text);
    const BlockSchedule schedule = resolve_schedule(g.schedule, process);
    StreamChoice sink(g.out, out);

    if (estimate->parsed()) {
      StreamChoice source(in, input);
      EstimateOptions opts;
      opts.schedule = schedule;
      opts.mode = mu ? MeanMode::known_mean(*mu) : MeanMode::unknown_mean();
      opts.emit_every = emit_every;
      opts.alpha = alpha;
      opts.ci_form = ci_form == "vn" ? CiForm::kSqrtVn : CiForm::kSqrtN;
      opts.theta = theta;
      std::optional<RecursiveEstimator> start;
      if (!resume.empty()) {
        std::ifstream f(resume);
        std::string line;
        if (!f || !std::getline(f, line)) throw ParameterError("cannot read checkpoint " + resume);
        start = RecursiveEstimator::restore(line, schedule, opts.mode);
      }
      const EstimateSummary s = run_estimate(source.in(), sink.out(), opts, start);
      if (s.samples == 0) err << "warning: no samples read\n";
      if (!checkpoint.empty()) {
        std::ofstream f(checkpoint);
        if (!f) throw ParameterError("cannot write checkpoint " + checkpoint);
        f << s.final_state.snapshot() << '\n';
      }
      return 0;
    }

    if (reference->parsed()) {
      StreamChoice source(in, input);
      const std::vector<double> xs = read_values(source.in(), 0);
      const double est = batched_means_tavc(xs, BatchSpec{batch_l, !no_overlap}, mu);
      CsvWriter csv(sink.out(), {"n", "l", "overlap", "sigma2_hat"});
      csv.cell(static_cast<std::int64_t>(xs.size())).cell(batch_l).cell(!no_overlap).cell(est).end_row();
      return 0;
    }

    if (tune->parsed()) {
      StreamChoice source(in, input);
      const std::vector<double> xs = read_values(source.in(), pilot_n);
      const TuningResult r = bk_block_length(xs);
      CsvWriter csv(sink.out(), {"l_hat", "lambda_hat", "c_hat"});
      csv.cell(r.l_hat).cell(r.lambda_hat).cell(r.c_hat).end_row();
      return 0;
    }

    if (simulate->parsed()) {
      ProcessStream s(*process, g.seed, stream_id);
      std::ostream& o = sink.out();
      for (std::int64_t i = 0; i < n; ++i) o << format_double(s.next()) << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      ExperimentConfig cfg;
      cfg.process = *process;
      cfg.schedule = schedule;
      cfg.known_mean = mode_text == "known";
      cfg.n_grid = parse_grid(grid_text);
      cfg.replications = reps;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      const SweepResult r = mse_sweep(cfg, !audit_log.empty());
      CsvWriter csv(sink.out(), {"n", "replications", "mean_estimate", "mse", "rmse", "se_of_mse", "constant_ratio", "slope"});
      for (const auto& row : r.rows) {
        csv.cell(row.n).cell(row.replications).cell(row.mean_estimate).cell(row.mse).cell(row.rmse);
        csv.cell(row.se_of_mse).cell(row.constant_ratio).cell(r.slope).end_row();
      }
      if (!audit_log.empty()) {
        std::ofstream f(audit_log);
        if (!f) throw ParameterError("cannot write audit log " + audit_log);
        CsvWriter log(f, {"n", "replication", "estimate", "sq_error"});
        for (const auto& rec : r.log) log.cell(rec.n).cell(rec.replication).cell(rec.estimate).cell(rec.sq_error).end_row();
        err << "audit: max relative mse discrepancy " << audit_sweep(r.rows, r.log) << '\n';
      }
      return 0;
    }

    if (ratio->parsed()) {
      RatioConfig cfg{*process, ratio_n, reps, g.seed, g.threads};
      const RatioResult r = ratio_experiment(cfg);
      if (r.low_replication) err << "warning: only " << r.replications << " replications; the ratio is noisy\n";
      CsvWriter csv(sink.out(), {"n", "replications", "c", "batch_length", "rmse_recursive", "rmse_batched", "ratio", "low_replication"});
      csv.cell(ratio_n).cell(r.replications).cell(r.c).cell(r.batch_length).cell(r.rmse_recursive);
      csv.cell(r.rmse_batched).cell(r.ratio).cell(r.low_replication).end_row();
      return 0;
    }

    if (diverge->parsed()) {
      DivergenceConfig cfg{max_exp, reps, g.seed, g.threads, control_c};
      const DivergenceReport r = divergence_demo(cfg);
      if (!r.warning.empty()) err << "warning: " << r.warning << '\n';
      CsvWriter csv(sink.out(), {"schedule", "exponent", "n", "mean", "sd"});
      for (const auto& row : r.rows) csv.cell("geom:r=2").cell(row.exponent).cell(row.n).cell(row.mean).cell(row.sd).end_row();
      const std::string control = "power:c=" + format_double(control_c) + ";p=1.5";
      csv.cell(control).cell(max_exp).cell(std::int64_t{1} << max_exp).cell(r.control_mean).cell(r.control_sd).end_row();
      if (r.non_decay_confirmed) {
        err << (*r.non_decay_confirmed ? "dispersion does not decay (sd >= 0.5): geometric schedule is inconsistent\n"
                                       : "dispersion below 0.5 at the largest n\n");
      }
      return 0;
    }

    if (stop->parsed()) {
      StopConfig cfg;
      cfg.schedule = schedule;
      cfg.alpha = alpha;
      cfg.half_width_target = target;
      cfg.n_min = n_min;
      cfg.n_max = n_max;
      cfg.replications = reps;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      CsvWriter csv(sink.out(), {"replication", "n", "mean", "sigma2_hat", "half_width", "converged", "covered"});
      auto row = [&](std::int64_t rep, const StopOutcome& o) {
        csv.cell(rep).cell(o.n).cell(o.mean).cell(o.sigma2_hat).cell(o.half_width).cell(o.converged);
        if (o.covered) csv.cell(*o.covered); else csv.cell("");
        csv.end_row();
        if (!o.converged) err << "replication " << rep << ": not converged by n=" << o.n << '\n';
      };
      if (process) {
        cfg.process = *process;
        const StopReport r = sequential_stop(cfg);
        for (std::size_t i = 0; i < r.runs.size(); ++i) row(static_cast<std::int64_t>(i), r.runs[i]);
        err << "mean stopping n " << r.mean_stopping_n << ", converged " << r.converged_fraction;
        if (r.coverage) err << ", coverage " << *r.coverage;
        err << '\n';
      } else {
        StreamChoice source(in, input);
        row(0, sequential_stop_stream(source.in(), cfg));
      }
      return 0;
    }

    if (multi->parsed()) {
      MultichainConfig cfg{*process, schedule, chains, chain_n, g.seed, g.threads};
      const MultichainReport r = multichain(cfg);
      CsvWriter csv(sink.out(), {"label", "sigma2_hat"});
      for (std::size_t i = 0; i < r.estimates.size(); ++i) csv.cell("chain_" + std::to_string(i)).cell(r.estimates[i]).end_row();
      csv.cell("mean").cell(r.mean).end_row();
      csv.cell("median").cell(r.median).end_row();
      csv.cell("q1").cell(r.q1).end_row();
      csv.cell("q3").cell(r.q3).end_row();
      csv.cell("iqr").cell(r.iqr).end_row();
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tavc
