#pragma once

#include <cstdint>

#include "tavc/compensated.hpp"
#include "tavc/schedule.hpp"

namespace tavc {

// Recursive estimate of the spectral density f(theta) at one frequency.
//
// Same block recursion as RecursiveEstimator, with each observation rotated
// by e^{i j theta} before it joins the block sum:
//   W_n(theta) = x_n e^{i n theta} + W_{n-1}(theta) 1{n is not a block start}
//   V_n(theta) = sum |W_i(theta)|^2,   f_hat = V_n(theta) / (2 pi v_n).
// The data must already be centred; there is no unknown-mean variant.
class SpectralEstimator {
 public:
  // Phase renormalisation period, in updates.
  static constexpr std::int64_t kRenormPeriod = 1024;

  SpectralEstimator(BlockSchedule schedule, double theta);

  // Throws NonFiniteInput for NaN/inf (state unchanged).
  void update(double x);

  double theta() const { return theta_; }
  std::int64_t n() const { return n_; }
  std::int64_t v() const { return v_; }
  double sum_w2() const { return sum_w2_.value(); }
  double block_sum_re() const { return w_re_; }
  double block_sum_im() const { return w_im_; }
  double phase_re() const { return phase_re_; }
  double phase_im() const { return phase_im_; }

  // V_n(theta) / (2 pi v_n). Throws NoDataError when n == 0.
  double density() const;

 private:
  BlockSchedule schedule_;
  double theta_;
  double rot_re_;
  double rot_im_;

  std::int64_t n_ = 0;
  std::int64_t k_ = 0;
  std::int64_t start_ = 0;
  std::int64_t next_start_ = 1;
  std::int64_t v_ = 0;
  double w_re_ = 0.0;
  double w_im_ = 0.0;
  double phase_re_ = 1.0;
  double phase_im_ = 0.0;
  CompensatedSum sum_w2_;
};

}  // namespace tavc
