#include "tavc/reference.hpp"

#include <cmath>
#include <vector>

#include "tavc/errors.hpp"

namespace tavc {

double batched_means_tavc(std::span<const double> xs, BatchSpec spec, std::optional<double> known_mean) {
  const auto n = static_cast<std::int64_t>(xs.size());
  if (spec.l < 1 || spec.l > n) throw ParameterError("batched means: need 1 <= l <= n");
  const std::int64_t l = spec.l;

  long double centre = 0.0L;
  if (known_mean) {
    centre = *known_mean;
  } else {
    for (double x : xs) centre += x;
    centre /= static_cast<long double>(n);
  }

  // prefix[i] = sum_{j<i} (x_j - centre)
  std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
  for (std::int64_t i = 0; i < n; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + (xs[static_cast<std::size_t>(i)] - centre);
  }
  const long double ll = static_cast<long double>(l);

  long double acc = 0.0L;
  std::int64_t batches = 0;
  const std::int64_t stride = spec.overlap ? 1 : l;
  for (std::int64_t j = 0; j + l <= n; j += stride) {
    const long double dev = (prefix[static_cast<std::size_t>(j + l)] - prefix[static_cast<std::size_t>(j)]) / ll;
    acc += dev * dev;
    ++batches;
  }
  return static_cast<double>(ll / static_cast<long double>(batches) * acc);
}

std::int64_t optimal_batch_length(double theta, double sigma2, std::int64_t n) {
  if (!(sigma2 > 0.0)) throw ParameterError("optimal_batch_length: sigma2 must be positive");
  if (n < 1) throw ParameterError("optimal_batch_length: n must be >= 1");
  // lambda* n^{1/3} as a single cube root.
  const double target = std::cbrt(3.0 * theta * theta * static_cast<double>(n) / (2.0 * sigma2 * sigma2));
  const auto l = static_cast<std::int64_t>(std::floor(target));
  return l < 1 ? 1 : l;
}

}  // namespace tavc
