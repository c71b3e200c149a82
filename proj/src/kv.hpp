#pragma once

// Parsing helpers for the "<kind>:key=value,key=value" spec strings shared by
// the schedule and process descriptions.

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <system_error>

#include "tavc/errors.hpp"

namespace tavc::detail {

struct KindAndArgs {
  std::string kind;
  std::map<std::string, std::string, std::less<>> args;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline KindAndArgs split_spec(std::string_view spec) {
  KindAndArgs out;
  const auto colon = spec.find(':');
  out.kind = std::string(trim(spec.substr(0, colon)));
  if (colon == std::string_view::npos) return out;
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      // bare token, e.g. the "@path" of explicit schedules
      out.args.emplace(std::string(item), std::string{});
      continue;
    }
    out.args.emplace(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

inline double require_double(const KindAndArgs& spec, std::string_view key) {
  auto it = spec.args.find(key);
  if (it == spec.args.end()) {
    throw ParameterError(spec.kind + ": missing parameter '" + std::string(key) + "'");
  }
  double v = 0.0;
  if (!parse_double(it->second, v)) {
    throw ParameterError(spec.kind + ": parameter '" + std::string(key) + "' is not a number: " + it->second);
  }
  return v;
}

inline double optional_double(const KindAndArgs& spec, std::string_view key, double fallback) {
  return spec.args.count(key) ? require_double(spec, key) : fallback;
}

inline std::int64_t require_int(const KindAndArgs& spec, std::string_view key) {
  auto it = spec.args.find(key);
  if (it == spec.args.end()) {
    throw ParameterError(spec.kind + ": missing parameter '" + std::string(key) + "'");
  }
  std::int64_t v = 0;
  if (!parse_int(it->second, v)) {
    throw ParameterError(spec.kind + ": parameter '" + std::string(key) + "' is not an integer: " + it->second);
  }
  return v;
}

}  // namespace tavc::detail
