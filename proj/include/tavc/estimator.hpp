#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tavc/compensated.hpp"
#include "tavc/schedule.hpp"

namespace tavc {

// Whether the process mean is known (observations are centred by mu before
// entering the recursion) or must be estimated by the running sample mean.
struct MeanMode {
  bool known = false;
  double mu = 0.0;

  static MeanMode known_mean(double mu) { return MeanMode{true, mu}; }
  static MeanMode unknown_mean() { return MeanMode{}; }
};

struct TavcEstimate {
  double sigma2_hat = 0.0;
  std::int64_t n = 0;
  std::int64_t v_n = 0;
  // The unknown-mean correction went negative through rounding and was set to 0.
  bool clamped = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

enum class CiForm {
  kSqrtN,   // mean +- z sigma_hat / sqrt(n), the interval implied by the CLT
  kSqrtVn,  // mean +- z sigma_hat / sqrt(v_n); exposed for comparison only
};

// Recursive O(1)-memory estimator of the time-average variance constant
// sigma^2 = sum_k gamma(k).
//
// Each observation extends the running block sum W_n (or starts a new block at
// the schedule boundaries a_k) and accumulates
//   V_n = sum W_i^2,  U_n = sum l_i W_i,  v_n = sum l_i,  q_n = sum l_i^2.
// With a known mean the estimate is V_n / v_n on the centred data. Otherwise
// V'_n = V_n - 2 U_n Xbar_n + q_n Xbar_n^2 replaces V_n.
//
// Internally all inputs are shifted by an origin (mu when known, the first
// observation otherwise). V'_n is shift invariant, so this removes the
// cancellation the correction would suffer on data far from zero; the
// accessors below translate back.
//
// The object holds a fixed set of scalars plus a shared handle to the
// immutable schedule. update() never allocates.
class RecursiveEstimator {
 public:
  RecursiveEstimator(BlockSchedule schedule, MeanMode mode);

  // Throws NonFiniteInput for NaN/inf (state unchanged) and CounterOverflow
  // if q_n would leave 64-bit range.
  void update(double x);

  std::int64_t n() const { return n_; }
  std::int64_t block_index() const { return k_; }
  std::int64_t block_start() const { return start_; }
  std::int64_t block_length() const { return n_ == 0 ? 0 : n_ - start_ + 1; }
  std::int64_t v() const { return v_; }
  std::int64_t q() const { return q_; }

  // Sample mean of the raw observations.
  double mean() const;

  // Running accumulators of the working data: the raw observations for
  // an unknown mean, x - mu for a known mean.
  double block_sum() const;   // W_n
  double sum_lw() const;      // U_n
  double sum_w2() const;      // V_n
  double centred_v() const;   // V'_n (equals V_n when the mean is known)

  // Throws NoDataError when n == 0.
  TavcEstimate tavc() const;

  // Xbar_n +- z_{1-alpha/2} sigma_hat / sqrt(n). Requires n >= 2; alpha in (0,1).
  Interval confidence_interval(double alpha, CiForm form = CiForm::kSqrtN) const;

  // sqrt(n) |Xbar_n - mu0| / sigma_hat. Throws DegenerateVariance if sigma_hat == 0.
  double t_statistic(double mu0) const;

  const BlockSchedule& schedule() const { return schedule_; }
  const MeanMode& mode() const { return mode_; }

  // "n,k,t,v,q,U,V,W,mean" with shortest round-trip float formatting.
  std::string snapshot() const;

  // Rebuilds an estimator from snapshot(); schedule and mode come from the
  // caller. Throws ParameterError on malformed or schedule-inconsistent lines.
  static RecursiveEstimator restore(std::string_view line, BlockSchedule schedule, MeanMode mode);

 private:
  BlockSchedule schedule_;
  MeanMode mode_;
  double origin_ = 0.0;

  std::int64_t n_ = 0;
  std::int64_t k_ = 0;
  std::int64_t start_ = 0;
  std::int64_t next_start_ = 1;
  std::int64_t v_ = 0;
  std::int64_t q_ = 0;
  double w_ = 0.0;
  CompensatedSum sum_x_;
  CompensatedSum sum_lw_;
  CompensatedSum sum_w2_;

  double shifted_mean() const { return sum_x_.value() / static_cast<double>(n_); }
};

// Formats a double with the shortest representation that parses back to the
// same value.
std::string format_double(double x);

}  // namespace tavc
