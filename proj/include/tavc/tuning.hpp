#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tavc {

struct TuningResult {
  std::int64_t l_hat = 1;
  double lambda_hat = 0.0;  // l_hat / n^{1/3}
  double c_hat = 0.0;       // (4 lambda_hat / 3)^{3/2}
  std::int64_t n = 0;
  double b_hat = 0.0;       // selected bandwidth; l_hat = round(1 / b_hat)
};

// Biased (1/n) sample autocovariance at lag |k|. Throws ParameterError if |k| >= n.
double autocov(std::span<const double> xs, std::int64_t k);

// gamma_hat(0), ..., gamma_hat(n-1) in O(n log n) via zero-padded FFT.
std::vector<double> autocov_all(std::span<const double> xs);

// Split-cosine window: 1 on |x| < 0.8, cosine taper to 0 on [0.8, 1], 0 beyond.
double split_cosine_window(double x);

// Tukey-Hanning window (1 + cos(pi x))/2 on |x| <= 1, 0 beyond.
double tukey_hanning_window(double x);

// Data-driven block length after Buhlmann and Kunsch: four fixed-point
// iterations of the pilot bandwidth with split-cosine weights, then a final
// ratio of a Tukey-Hanning sigma^2 estimate to a split-cosine estimate of
// sum |k| gamma(k).
// Throws ParameterError for n < 50, DegenerateSeries for constant input and
// TuningFailed when the bandwidth is not positive and finite.
TuningResult bk_block_length(std::span<const double> xs);

// (4 lambda_hat / 3)^{3/2} from bk_block_length.
double c_hat_from_pilot(std::span<const double> xs);

// Schedule constant implied by a block length: (4 (l / n^{1/3}) / 3)^{3/2}.
double c_from_block_length(std::int64_t l_hat, std::int64_t n);

// theta = -2 sum_{k=1}^K k gamma(k); gamma[0] holds gamma(1).
double theta_of_covs(std::span<const double> gamma);

// MSE-optimal power-law constant 4 sqrt(2) |theta| / (3 sigma2).
// Throws ParameterError if sigma2 <= 0.
double c_star(double theta, double sigma2);

// Rate-balancing exponent (1/2 + q) / (q - 1/2 + 2/alpha) for a process with
// dependence index q in (0,1] and alpha moments. alpha may be +inf.
// Throws ParameterError when the denominator is not positive.
double optimal_p(double q, double alpha);

}  // namespace tavc
