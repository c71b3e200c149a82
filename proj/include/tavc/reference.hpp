#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace tavc {

struct BatchSpec {
  std::int64_t l = 1;
  bool overlap = true;
};

// Batched-means TAVC estimate over an in-memory sample (O(n) memory).
//
// Overlapping:      l/(n-l+1) * sum_{j=1}^{n-l+1} (mean(x_j..x_{j+l-1}) - c)^2
// Non-overlapping:  l/b * sum over the b = floor(n/l) full disjoint batches,
//                   ragged tail dropped.
// The centre c is the sample mean, or `known_mean` when supplied.
// Throws ParameterError unless 1 <= l <= n.
double batched_means_tavc(std::span<const double> xs, BatchSpec spec,
                          std::optional<double> known_mean = std::nullopt);

// MSE-optimal batch length max(1, floor(lambda* n^{1/3})) with
// lambda*^3 = 3 theta^2 / (2 sigma2^2). Throws ParameterError if sigma2 <= 0.
std::int64_t optimal_batch_length(double theta, double sigma2, std::int64_t n);

}  // namespace tavc
