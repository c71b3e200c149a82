#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's schedule, estimator or tuning code.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

// First boundaries a_1..a_K (a_K > limit) of the repaired power law.
inline std::vector<std::int64_t> power_boundaries(double c, double p, std::int64_t limit) {
  std::vector<std::int64_t> a{1};
  for (std::int64_t k = 2; a.back() <= limit; ++k) {
    const auto raw = static_cast<std::int64_t>(std::floor(c * std::pow(static_cast<double>(k), p)));
    a.push_back(raw > a.back() ? raw : a.back() + 1);
  }
  return a;
}

inline std::vector<std::int64_t> geometric_boundaries(std::int64_t r, std::int64_t limit) {
  std::vector<std::int64_t> a{1};
  while (a.back() <= limit) a.push_back(a.back() * r);
  return a;
}

// t_i for i = 1..n by linear scan; entry 0 unused.
inline std::vector<std::int64_t> block_starts(const std::vector<std::int64_t>& a, std::int64_t n) {
  std::vector<std::int64_t> t(static_cast<std::size_t>(n) + 1, 0);
  std::size_t k = 0;
  for (std::int64_t i = 1; i <= n; ++i) {
    while (k + 1 < a.size() && a[k + 1] <= i) ++k;
    t[static_cast<std::size_t>(i)] = a[k];
  }
  return t;
}

struct Direct {
  long double V = 0;
  long double U = 0;
  long double Vp = 0;  // from W'_i = W_i - l_i Xbar directly
  long double mean = 0;
  std::int64_t v = 0;
  std::int64_t q = 0;
  long double W = 0;
};

// From-scratch evaluation: each W_i summed over x_{t_i..i}.
inline Direct direct(std::span<const double> xs, const std::vector<std::int64_t>& a) {
  const auto n = static_cast<std::int64_t>(xs.size());
  const auto t = block_starts(a, n);
  Direct d;
  for (double x : xs) d.mean += x;
  d.mean /= static_cast<long double>(n);
  for (std::int64_t i = 1; i <= n; ++i) {
    long double w = 0;
    for (std::int64_t j = t[static_cast<std::size_t>(i)]; j <= i; ++j) w += xs[static_cast<std::size_t>(j - 1)];
    const std::int64_t l = i - t[static_cast<std::size_t>(i)] + 1;
    d.V += w * w;
    d.U += static_cast<long double>(l) * w;
    const long double wp = w - static_cast<long double>(l) * d.mean;
    d.Vp += wp * wp;
    d.v += l;
    d.q += l * l;
    d.W = w;
  }
  return d;
}

// z_p by bisection on the erfc-based CDF. For p > 1/2 the upper tail
// probability 1 - p is matched instead, which keeps full relative precision.
inline double normal_quantile_bisect(double p) {
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  double lo = -40.0;
  double hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::numbers::sqrt2);
    (cdf < target ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  return upper ? -z : z;
}

inline double autocov_direct(std::span<const double> xs, std::int64_t lag) {
  const auto n = static_cast<std::int64_t>(xs.size());
  long double m = 0;
  for (double x : xs) m += x;
  m /= n;
  long double acc = 0;
  for (std::int64_t i = 0; i + lag < n; ++i) acc += (xs[static_cast<std::size_t>(i)] - m) * (xs[static_cast<std::size_t>(i + lag)] - m);
  return static_cast<double>(acc / n);
}

inline double w_sc(double x) {
  x = std::fabs(x);
  if (x < 0.8) return 1.0;
  if (x <= 1.0) return (1.0 + std::cos(5.0 * (x - 0.8) * std::numbers::pi)) / 2.0;
  return 0.0;
}

inline double w_th(double x) {
  x = std::fabs(x);
  return x <= 1.0 ? (1.0 + std::cos(std::numbers::pi * x)) / 2.0 : 0.0;
}

// Block-length selection written out over the full lag range k = 1-n..n-1
// with O(n^2) autocovariances; returns l_hat.
inline std::int64_t bk_block_length_direct(std::span<const double> xs) {
  const auto n = static_cast<std::int64_t>(xs.size());
  std::vector<double> g(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = autocov_direct(xs, k);
  auto gamma = [&](std::int64_t k) { return g[static_cast<std::size_t>(k < 0 ? -k : k)]; };
  const double nd = static_cast<double>(n);
  const double s421 = std::pow(nd, 4.0 / 21.0);
  double num = 0;
  for (std::int64_t k = 1 - n; k <= n - 1; ++k) num += gamma(k) * gamma(k);
  double b = 1.0 / nd;
  for (int m = 1; m <= 4; ++m) {
    double den = 0;
    for (std::int64_t k = 1 - n; k <= n - 1; ++k) {
      const double kd = static_cast<double>(k);
      den += w_sc(kd * b * s421) * kd * kd * gamma(k) * gamma(k);
    }
    b = std::pow(nd, -1.0 / 3.0) * std::pow(num / (6.0 * den), 1.0 / 3.0);
  }
  double top = 0;
  double bot = 0;
  for (std::int64_t k = 1 - n; k <= n - 1; ++k) {
    const double kd = static_cast<double>(k);
    top += w_th(kd * b * s421) * gamma(k);
    bot += w_sc(kd * b * s421) * std::fabs(kd) * gamma(k);
  }
  const double b_hat = std::pow(nd, -1.0 / 3.0) * std::pow(2.0 * top * top / (3.0 * bot * bot), 1.0 / 3.0);
  const auto l = static_cast<std::int64_t>(std::llround(1.0 / b_hat));
  return l < 1 ? 1 : l;
}

// Kolmogorov distribution tail P(K > lambda).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::fmin(1.0, std::fmax(0.0, 2.0 * sum));
}

}  // namespace oracle
