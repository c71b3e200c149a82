#include "tavc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kv.hpp"
#include "tavc/errors.hpp"

namespace tavc {

namespace {

__extension__ using i128 = __int128;

// Longest repaired prefix we are willing to tabulate. Only tiny c (< ~1e-3)
// needs more than a few thousand entries.
constexpr std::size_t kMaxRepairPrefix = 10'000'000;

std::int64_t to_int64(i128 v, const char* what) {
  if (v > static_cast<i128>(std::numeric_limits<std::int64_t>::max())) {
    throw CounterOverflow(std::string(what) + " exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

BlockSchedule BlockSchedule::power_law(double c, double p) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("power schedule: c must be positive and finite");
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("power schedule: p must be > 1");
  BlockSchedule s;
  s.kind_ = Kind::kPowerLaw;
  s.c_ = c;
  s.p_ = p;

  std::vector<std::int64_t> prefix{1};
  for (std::int64_t k = 2;; ++k) {
    const std::int64_t raw = s.raw_power(k);
    if (raw == kNoBoundary) throw ParameterError("power schedule: boundaries overflow before repair settles");
    const std::int64_t a = std::max(prefix.back() + 1, raw);
    prefix.push_back(a);
    // Once a_k is unrepaired and the real-valued gaps c((k+1)^p - k^p) reach 1,
    // floor(c k^p) is strictly increasing from here on.
    const double gap = c * (std::pow(static_cast<double>(k + 1), p) - std::pow(static_cast<double>(k), p));
    if (a == raw && gap >= 1.0 + 1e-9) break;
    if (prefix.size() > kMaxRepairPrefix) throw ParameterError("power schedule: c too small (repair region too long)");
  }
  s.table_ = std::make_shared<const std::vector<std::int64_t>>(std::move(prefix));
  return s;
}

BlockSchedule BlockSchedule::geometric(std::int64_t r) {
  if (r < 2) throw ParameterError("geometric schedule: r must be >= 2");
  BlockSchedule s;
  s.kind_ = Kind::kGeometric;
  s.r_ = r;
  return s;
}

BlockSchedule BlockSchedule::explicit_table(std::vector<std::int64_t> table) {
  if (table.empty() || table.front() != 1) throw ParameterError("explicit schedule: table must start at 1");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i] <= table[i - 1]) throw ParameterError("explicit schedule: table must be strictly increasing");
  }
  BlockSchedule s;
  s.kind_ = Kind::kExplicit;
  s.table_ = std::make_shared<const std::vector<std::int64_t>>(std::move(table));
  return s;
}

BlockSchedule BlockSchedule::parse(std::string_view spec) {
  const auto parsed = detail::split_spec(spec);
  if (parsed.kind == "power") {
    return power_law(detail::require_double(parsed, "c"), detail::require_double(parsed, "p"));
  }
  if (parsed.kind == "geom") {
    return geometric(detail::require_int(parsed, "r"));
  }
  if (parsed.kind == "explicit") {
    const auto colon = spec.find(':');
    std::string_view rest = detail::trim(spec.substr(colon + 1));
    if (rest.empty() || rest.front() != '@') throw ParameterError("explicit schedule: expected explicit:@<path>");
    const std::string path(rest.substr(1));
    std::ifstream in(path);
    if (!in) throw ParameterError("explicit schedule: cannot open " + path);
    std::vector<std::int64_t> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      std::int64_t v = 0;
      if (!detail::parse_int(line, v)) {
        throw ParameterError("explicit schedule: " + path + ":" + std::to_string(line_no) + ": not an integer");
      }
      table.push_back(v);
    }
    return explicit_table(std::move(table));
  }
  throw ParameterError("unknown schedule kind '" + parsed.kind + "' (expected power, geom or explicit)");
}

std::int64_t BlockSchedule::raw_power(std::int64_t k) const {
  const double v = std::floor(c_ * std::pow(static_cast<double>(k), p_));
  if (!(v < 9.0e18)) return kNoBoundary;
  return static_cast<std::int64_t>(v);
}

std::int64_t BlockSchedule::boundary(std::int64_t k) const {
  if (k < 1) throw ParameterError("boundary index must be >= 1");
  switch (kind_) {
    case Kind::kPowerLaw:
      if (static_cast<std::size_t>(k) <= table_->size()) return (*table_)[static_cast<std::size_t>(k - 1)];
      return raw_power(k);
    case Kind::kGeometric: {
      std::int64_t a = 1;
      for (std::int64_t i = 1; i < k; ++i) {
        if (__builtin_mul_overflow(a, r_, &a)) return kNoBoundary;
      }
      return a;
    }
    case Kind::kExplicit:
      if (static_cast<std::size_t>(k) <= table_->size()) return (*table_)[static_cast<std::size_t>(k - 1)];
      return kNoBoundary;
  }
  return kNoBoundary;
}

std::string BlockSchedule::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kPowerLaw:
      os << "power:c=" << c_ << ",p=" << p_;
      break;
    case Kind::kGeometric:
      os << "geom:r=" << r_ << " (inconsistent: block gaps grow too fast for V_n/v_n to converge)";
      break;
    case Kind::kExplicit:
      os << "explicit:" << table_->size() << " boundaries, last=" << table_->back();
      break;
  }
  return os.str();
}

BlockPosition position(const BlockSchedule& schedule, std::int64_t n) {
  if (n < 1) throw ParameterError("position: n must be >= 1");
  std::int64_t k = 1;
  switch (schedule.kind()) {
    case BlockSchedule::Kind::kExplicit: {
      // Largest k with a_k <= n: gallop, then bisect.
      std::int64_t lo = 1;
      std::int64_t step = 1;
      while (schedule.boundary(lo + step) <= n) {
        lo += step;
        step *= 2;
      }
      std::int64_t hi = lo + step - 1;
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo + 1) / 2;
        if (schedule.boundary(mid) <= n) lo = mid; else hi = mid - 1;
      }
      k = lo;
      break;
    }
    case BlockSchedule::Kind::kGeometric: {
      std::int64_t a = 1;
      while (true) {
        std::int64_t next = 0;
        if (__builtin_mul_overflow(a, schedule.r(), &next) || next > n) break;
        a = next;
        ++k;
      }
      break;
    }
    case BlockSchedule::Kind::kPowerLaw: {
      // Initial guess k_n = ceil(((n+1)/c)^{1/p}) - 1, then walk to the exact
      // block of the repaired sequence.
      const double guess = std::ceil(std::pow((static_cast<double>(n) + 1.0) / schedule.c(), 1.0 / schedule.p())) - 1.0;
      k = std::max<std::int64_t>(1, static_cast<std::int64_t>(guess));
      while (k > 1 && schedule.boundary(k) > n) --k;
      while (schedule.boundary(k + 1) <= n) ++k;
      break;
    }
  }
  const std::int64_t t = schedule.boundary(k);
  return BlockPosition{n, k, t, n - t + 1};
}

bool is_block_start(const BlockSchedule& schedule, std::int64_t n) {
  return position(schedule, n).l == 1;
}

namespace {

// Visits every block intersecting [1, n] with its length inside [1, n].
template <class F>
void for_each_block_length(const BlockSchedule& schedule, std::int64_t n, F&& f) {
  if (n < 1) throw ParameterError("n must be >= 1");
  std::int64_t a = schedule.boundary(1);
  for (std::int64_t k = 1;; ++k) {
    const std::int64_t next = schedule.boundary(k + 1);
    if (next > n) {
      f(n - a + 1);
      return;
    }
    f(next - a);
    a = next;
  }
}

}  // namespace

std::int64_t v_exact(const BlockSchedule& schedule, std::int64_t n) {
  i128 total = 0;
  for_each_block_length(schedule, n, [&](std::int64_t len) {
    const i128 l = len;
    total += l * (l + 1) / 2;
  });
  return to_int64(total, "v_n");
}

std::int64_t q_exact(const BlockSchedule& schedule, std::int64_t n) {
  i128 total = 0;
  for_each_block_length(schedule, n, [&](std::int64_t len) {
    const i128 l = len;
    total += l * (l + 1) * (2 * l + 1) / 6;
  });
  return to_int64(total, "q_n");
}

double v_asymptotic(double c, double p, std::int64_t n) {
  if (!(c > 0.0) || !(p > 1.0)) throw ParameterError("v_asymptotic: need c > 0, p > 1");
  const double m = std::pow(static_cast<double>(n) / c, 1.0 / p);
  return std::pow(m, 2.0 * p - 1.0) * c * c * p * p / (4.0 * p - 2.0);
}

}  // namespace tavc
