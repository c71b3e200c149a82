#include "tavc/estimator.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "kv.hpp"
#include "tavc/errors.hpp"
#include "tavc/normal.hpp"

namespace tavc {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

RecursiveEstimator::RecursiveEstimator(BlockSchedule schedule, MeanMode mode)
    : schedule_(std::move(schedule)), mode_(mode) {
  if (mode_.known && !std::isfinite(mode_.mu)) throw ParameterError("known mean must be finite");
  next_start_ = schedule_.boundary(1);
}

void RecursiveEstimator::update(double x) {
  if (!std::isfinite(x)) throw NonFiniteInput("non-finite observation rejected");
  double y = mode_.known ? x - mode_.mu : x;
  if (n_ == 0 && !mode_.known) origin_ = y;
  const double z = y - origin_;

  const std::int64_t n1 = n_ + 1;
  const bool starts_block = (n1 == next_start_);
  const std::int64_t start = starts_block ? n1 : start_;
  const std::int64_t l = n1 - start + 1;
  std::int64_t q = 0;
  std::int64_t v = 0;
  if (__builtin_mul_overflow(l, l, &q) || __builtin_add_overflow(q_, q, &q) || __builtin_add_overflow(v_, l, &v)) {
    throw CounterOverflow("q_n exceeds 64-bit range");
  }

  if (starts_block) {
    ++k_;
    start_ = n1;
    next_start_ = schedule_.boundary(k_ + 1);
    w_ = z;
  } else {
    w_ += z;
  }
  n_ = n1;
  v_ = v;
  q_ = q;
  sum_x_.add(z);
  sum_w2_.add(w_ * w_);
  sum_lw_.add(static_cast<double>(l) * w_);
}

double RecursiveEstimator::mean() const {
  if (n_ == 0) return mode_.known ? mode_.mu : 0.0;
  return (mode_.known ? mode_.mu : 0.0) + origin_ + shifted_mean();
}

double RecursiveEstimator::block_sum() const { return w_ + static_cast<double>(block_length()) * origin_; }

double RecursiveEstimator::sum_lw() const { return sum_lw_.value() + origin_ * static_cast<double>(q_); }

double RecursiveEstimator::sum_w2() const {
  const double o = origin_;
  return sum_w2_.value() + 2.0 * o * sum_lw_.value() + o * o * static_cast<double>(q_);
}

double RecursiveEstimator::centred_v() const {
  if (mode_.known || n_ == 0) return sum_w2_.value();
  const double m = shifted_mean();
  return sum_w2_.value() - 2.0 * sum_lw_.value() * m + static_cast<double>(q_) * m * m;
}

TavcEstimate RecursiveEstimator::tavc() const {
  if (n_ == 0) throw NoDataError("tavc: no observations");
  TavcEstimate est;
  est.n = n_;
  est.v_n = v_;
  double vv = centred_v();
  if (vv < 0.0) {
    vv = 0.0;
    est.clamped = true;
  }
  est.sigma2_hat = vv / static_cast<double>(v_);
  return est;
}

Interval RecursiveEstimator::confidence_interval(double alpha, CiForm form) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("confidence_interval: alpha must lie in (0, 1)");
  if (n_ < 2) throw NoDataError("confidence_interval: needs at least two observations");
  const double sigma = std::sqrt(tavc().sigma2_hat);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double scale = form == CiForm::kSqrtN ? static_cast<double>(n_) : static_cast<double>(v_);
  const double half = z * sigma / std::sqrt(scale);
  const double centre = mean();
  return Interval{centre - half, centre + half};
}

double RecursiveEstimator::t_statistic(double mu0) const {
  if (n_ < 2) throw NoDataError("t_statistic: needs at least two observations");
  const double sigma = std::sqrt(tavc().sigma2_hat);
  if (!(sigma > 0.0)) throw DegenerateVariance("t_statistic: sigma_hat is zero");
  return std::sqrt(static_cast<double>(n_)) * std::fabs(mean() - mu0) / sigma;
}

std::string RecursiveEstimator::snapshot() const {
  std::string out;
  out += std::to_string(n_) + ',' + std::to_string(k_) + ',' + std::to_string(start_) + ',';
  out += std::to_string(v_) + ',' + std::to_string(q_) + ',';
  out += format_double(sum_lw()) + ',' + format_double(sum_w2()) + ',' + format_double(block_sum()) + ',';
  out += format_double(mean());
  return out;
}

RecursiveEstimator RecursiveEstimator::restore(std::string_view line, BlockSchedule schedule, MeanMode mode) {
  std::vector<std::string_view> fields;
  line = detail::trim(line);
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (fields.size() != 9) throw ParameterError("snapshot: expected 9 fields n,k,t,v,q,U,V,W,mean");
  std::int64_t ints[5];
  double reals[4];
  for (int i = 0; i < 5; ++i) {
    if (!detail::parse_int(fields[i], ints[i])) throw ParameterError("snapshot: field " + std::to_string(i + 1) + " is not an integer");
  }
  for (int i = 0; i < 4; ++i) {
    if (!detail::parse_double(fields[5 + i], reals[i]) || !std::isfinite(reals[i])) {
      throw ParameterError("snapshot: field " + std::to_string(6 + i) + " is not a finite number");
    }
  }

  RecursiveEstimator est(std::move(schedule), mode);
  const std::int64_t n = ints[0];
  if (n < 0) throw ParameterError("snapshot: negative n");
  if (n == 0) return est;
  const BlockPosition pos = position(est.schedule_, n);
  if (pos.k != ints[1] || pos.t != ints[2]) throw ParameterError("snapshot: block position does not match the schedule");
  if (ints[3] != v_exact(est.schedule_, n) || ints[4] != q_exact(est.schedule_, n)) {
    throw ParameterError("snapshot: v/q do not match the schedule");
  }
  est.n_ = n;
  est.k_ = pos.k;
  est.start_ = pos.t;
  est.next_start_ = est.schedule_.boundary(pos.k + 1);
  est.v_ = ints[3];
  est.q_ = ints[4];
  est.origin_ = 0.0;
  est.sum_lw_ = CompensatedSum(reals[0]);
  est.sum_w2_ = CompensatedSum(reals[1]);
  est.w_ = reals[2];
  const double shift = mode.known ? mode.mu : 0.0;
  est.sum_x_ = CompensatedSum((reals[3] - shift) * static_cast<double>(n));
  return est;
}

}  // namespace tavc
