#include "tavc/spectral.hpp"

#include <cmath>
#include <numbers>

#include "tavc/errors.hpp"

namespace tavc {

SpectralEstimator::SpectralEstimator(BlockSchedule schedule, double theta)
    : schedule_(std::move(schedule)), theta_(theta), rot_re_(std::cos(theta)), rot_im_(std::sin(theta)) {
  if (!std::isfinite(theta)) throw ParameterError("spectral: theta must be finite");
  next_start_ = schedule_.boundary(1);
}

void SpectralEstimator::update(double x) {
  if (!std::isfinite(x)) throw NonFiniteInput("non-finite observation rejected");
  const std::int64_t n1 = n_ + 1;
  std::int64_t v = 0;

  // phase <- phase * e^{i theta}, giving e^{i n1 theta}
  double pr = phase_re_ * rot_re_ - phase_im_ * rot_im_;
  double pi = phase_re_ * rot_im_ + phase_im_ * rot_re_;
  if (n1 % kRenormPeriod == 0) {
    const double mod = std::hypot(pr, pi);
    pr /= mod;
    pi /= mod;
  }

  const bool starts_block = (n1 == next_start_);
  const std::int64_t start = starts_block ? n1 : start_;
  if (__builtin_add_overflow(v_, n1 - start + 1, &v)) throw CounterOverflow("v_n exceeds 64-bit range");

  if (starts_block) {
    ++k_;
    start_ = n1;
    next_start_ = schedule_.boundary(k_ + 1);
    w_re_ = x * pr;
    w_im_ = x * pi;
  } else {
    w_re_ += x * pr;
    w_im_ += x * pi;
  }
  phase_re_ = pr;
  phase_im_ = pi;
  n_ = n1;
  v_ = v;
  sum_w2_.add(w_re_ * w_re_ + w_im_ * w_im_);
}

double SpectralEstimator::density() const {
  if (n_ == 0) throw NoDataError("density: no observations");
  return sum_w2_.value() / (2.0 * std::numbers::pi * static_cast<double>(v_));
}

}  // namespace tavc
