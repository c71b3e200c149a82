#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tavc {

// Sentinel returned by BlockSchedule::boundary() when a_k does not exist
// (past the end of an explicit table, or beyond 64-bit range).
inline constexpr std::int64_t kNoBoundary = std::numeric_limits<std::int64_t>::max();

// Where index n sits inside the block partition: a_k <= n < a_{k+1},
// block start t = a_k and length-so-far l = n - t + 1.
struct BlockPosition {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t t = 0;
  std::int64_t l = 0;

  friend bool operator==(const BlockPosition&, const BlockPosition&) = default;
};

// The strictly increasing block-boundary sequence a_1 = 1 < a_2 < ...
//
// Three families are supported:
//  - power law  a_k = max(a_{k-1} + 1, floor(c k^p)), a_1 = 1 (c > 0, p > 1).
//    The max() repairs the small-k region where floor(c k^p) is not strictly
//    increasing or does not start at 1.
//  - geometric  a_k = r^{k-1}. Inconsistent: the block gaps grow so fast that
//    V_n/v_n does not converge. Kept only to demonstrate that failure.
//  - explicit   a user table starting at 1. Past the last entry the final
//    block never closes.
//
// Copies share the immutable description, so a schedule is cheap to pass by
// value and safe to read from any number of threads.
class BlockSchedule {
 public:
  enum class Kind { kPowerLaw, kGeometric, kExplicit };

  static BlockSchedule power_law(double c, double p);
  static BlockSchedule geometric(std::int64_t r);
  static BlockSchedule explicit_table(std::vector<std::int64_t> table);

  // "power:c=<float>,p=<float>", "geom:r=<int>" or "explicit:@<path>"
  // (newline-delimited integers). Throws ParameterError.
  static BlockSchedule parse(std::string_view spec);

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double p() const { return p_; }
  std::int64_t r() const { return r_; }

  // a_k for k >= 1, or kNoBoundary.
  std::int64_t boundary(std::int64_t k) const;

  // Human-readable description; geometric schedules are flagged inconsistent.
  std::string describe() const;

 private:
  BlockSchedule() = default;

  Kind kind_ = Kind::kPowerLaw;
  double c_ = 1.0;
  double p_ = 2.0;
  std::int64_t r_ = 2;
  // Power law: the repaired prefix a_1..a_K after which a_k = floor(c k^p).
  // Explicit: the whole table.
  std::shared_ptr<const std::vector<std::int64_t>> table_;

  std::int64_t raw_power(std::int64_t k) const;
};

// The unique (k, t, l) with a_k <= n < a_{k+1}. Requires n >= 1.
BlockPosition position(const BlockSchedule& schedule, std::int64_t n);

// true iff n = a_k for some k.
bool is_block_start(const BlockSchedule& schedule, std::int64_t n);

// v_n = sum_{i<=n} l_i via per-block triangular numbers; the partial final
// block contributes (n - a_m + 1)(n - a_m + 2)/2.
std::int64_t v_exact(const BlockSchedule& schedule, std::int64_t n);

// q_n = sum_{i<=n} l_i^2, same block-wise evaluation.
std::int64_t q_exact(const BlockSchedule& schedule, std::int64_t n);

// Large-n approximation m^{2p-1} c^2 p^2 / (4p - 2) with m = (n/c)^{1/p}.
// Only meaningful for sanity ratios against v_exact.
double v_asymptotic(double c, double p, std::int64_t n);

}  // namespace tavc
