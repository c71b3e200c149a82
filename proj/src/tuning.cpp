#include "tavc/tuning.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "tavc/errors.hpp"

namespace tavc {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

std::size_t next_fast_size(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::int64_t round_half_away(double x) { return static_cast<std::int64_t>(std::round(x)); }

}  // namespace

double autocov(std::span<const double> xs, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(xs.size());
  const std::int64_t lag = k < 0 ? -k : k;
  if (lag >= n) throw ParameterError("autocov: |k| must be < n");
  long double mean = 0.0L;
  for (double x : xs) mean += x;
  mean /= static_cast<long double>(n);
  long double acc = 0.0L;
  for (std::int64_t i = 0; i + lag < n; ++i) {
    acc += (xs[static_cast<std::size_t>(i)] - mean) * (xs[static_cast<std::size_t>(i + lag)] - mean);
  }
  return static_cast<double>(acc / static_cast<long double>(n));
}

std::vector<double> autocov_all(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) throw ParameterError("autocov_all: empty input");
  long double mean_acc = 0.0L;
  for (double x : xs) mean_acc += x;
  const double mean = static_cast<double>(mean_acc / static_cast<long double>(n));

  const std::size_t m = next_fast_size(2 * n);
  const std::size_t bins = m / 2 + 1;
  std::unique_ptr<double, FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
  std::unique_ptr<fftw_complex, FftwFree> spec(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  if (!buf || !spec) throw std::bad_alloc();

  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.get(), spec.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), buf.get(), FFTW_ESTIMATE);
  }

  double* b = buf.get();
  for (std::size_t i = 0; i < n; ++i) b[i] = xs[i] - mean;
  std::fill(b + n, b + m, 0.0);
  fftw_execute(fwd);
  fftw_complex* s = spec.get();
  for (std::size_t i = 0; i < bins; ++i) {
    s[i][0] = s[i][0] * s[i][0] + s[i][1] * s[i][1];
    s[i][1] = 0.0;
  }
  fftw_execute(inv);

  std::vector<double> gamma(n);
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) gamma[k] = b[k] * scale;

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  return gamma;
}

double split_cosine_window(double x) {
  const double a = std::fabs(x);
  if (a < 0.8) return 1.0;
  if (a <= 1.0) return (1.0 + std::cos(5.0 * (a - 0.8) * std::numbers::pi)) / 2.0;
  return 0.0;
}

double tukey_hanning_window(double x) {
  const double a = std::fabs(x);
  if (a <= 1.0) return (1.0 + std::cos(std::numbers::pi * a)) / 2.0;
  return 0.0;
}

TuningResult bk_block_length(std::span<const double> xs) {
  const auto n = static_cast<std::int64_t>(xs.size());
  if (n < 50) throw ParameterError("bk_block_length: need at least 50 observations");
  const std::vector<double> gamma = autocov_all(xs);
  if (!(gamma[0] > 0.0)) throw DegenerateSeries("bk_block_length: constant series");

  const double nd = static_cast<double>(n);
  const double n_third = std::cbrt(nd);
  const double window_scale = std::pow(nd, 4.0 / 21.0);

  // Sums over k = 1-n..n-1 fold onto k >= 1 by symmetry. The windows vanish
  // for |k| * scale > 1, so only lags up to 1/scale are visited.
  auto lag_limit = [&](double scale) {
    const double lim = std::floor(1.0 / scale);
    return lim >= nd - 1.0 ? n - 1 : static_cast<std::int64_t>(lim);
  };

  double sum_g2 = gamma[0] * gamma[0];
  for (std::int64_t k = 1; k < n; ++k) sum_g2 += 2.0 * gamma[static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k)];

  double b = 1.0 / nd;
  for (int iter = 0; iter < 4; ++iter) {
    const double scale = b * window_scale;
    double denom = 0.0;
    const std::int64_t kmax = lag_limit(scale);
    for (std::int64_t k = 1; k <= kmax; ++k) {
      const double g = gamma[static_cast<std::size_t>(k)];
      const double kd = static_cast<double>(k);
      denom += 2.0 * split_cosine_window(kd * scale) * kd * kd * g * g;
    }
    b = std::cbrt(sum_g2 / (6.0 * denom)) / n_third;
    if (!std::isfinite(b) || !(b > 0.0)) throw TuningFailed("bk_block_length: pilot bandwidth degenerate");
  }

  const double scale = b * window_scale;
  const std::int64_t kmax = lag_limit(scale);
  double sigma2_est = gamma[0];
  double abs_moment = 0.0;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const double g = gamma[static_cast<std::size_t>(k)];
    const double kd = static_cast<double>(k);
    sigma2_est += 2.0 * tukey_hanning_window(kd * scale) * g;
    abs_moment += 2.0 * split_cosine_window(kd * scale) * kd * g;
  }
  const double b_hat = std::cbrt(2.0 * sigma2_est * sigma2_est / (3.0 * abs_moment * abs_moment)) / n_third;
  if (!std::isfinite(b_hat) || !(b_hat > 0.0)) throw TuningFailed("bk_block_length: final bandwidth degenerate");

  TuningResult r;
  r.n = n;
  r.b_hat = b_hat;
  r.l_hat = std::max<std::int64_t>(1, round_half_away(1.0 / b_hat));
  r.lambda_hat = static_cast<double>(r.l_hat) / n_third;
  r.c_hat = std::pow(4.0 * r.lambda_hat / 3.0, 1.5);
  return r;
}

double c_from_block_length(std::int64_t l_hat, std::int64_t n) {
  if (l_hat < 1 || n < 1) throw ParameterError("c_from_block_length: need l_hat >= 1, n >= 1");
  const double lambda = static_cast<double>(l_hat) / std::cbrt(static_cast<double>(n));
  return std::pow(4.0 * lambda / 3.0, 1.5);
}

double c_hat_from_pilot(std::span<const double> xs) { return bk_block_length(xs).c_hat; }

double theta_of_covs(std::span<const double> gamma) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < gamma.size(); ++i) acc += static_cast<long double>(i + 1) * gamma[i];
  return static_cast<double>(-2.0L * acc);
}

double c_star(double theta, double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("c_star: sigma2 must be positive");
  return 4.0 * std::numbers::sqrt2 * std::fabs(theta) / (3.0 * sigma2);
}

double optimal_p(double q, double alpha) {
  const double denom = q - 0.5 + 2.0 / alpha;
  if (!(denom > 0.0)) throw ParameterError("optimal_p: parameters outside regime (non-positive denominator)");
  return (0.5 + q) / denom;
}

}  // namespace tavc
