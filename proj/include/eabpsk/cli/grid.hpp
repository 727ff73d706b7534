#pragma once

// Axis specifications accepted on the command line:
//   "0.01"                    single value
//   "0.5,0.45"                explicit list
//   "logspace:lo:hi:n"        n log-spaced points, lo, hi > 0, n >= 2
//   "linspace:lo:hi:n"        n evenly spaced points, n >= 2

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eabpsk/errors.hpp"
#include "eabpsk/cli/table.hpp"

namespace eabpsk::cli {

inline double parse_number(std::string_view text, const std::string& field) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidParameter(field, "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

inline std::vector<double> parse_grid(std::string_view spec, const std::string& field) {
  if (spec.empty()) throw InvalidParameter(field, "empty value");
  const bool log_spaced = spec.starts_with("logspace:");
  const bool lin_spaced = spec.starts_with("linspace:");
  if (log_spaced || lin_spaced) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 4) {
      throw InvalidParameter(field, "expected '" + std::string(parts[0]) + ":lo:hi:n'");
    }
    const double lo = parse_number(parts[1], field);
    const double hi = parse_number(parts[2], field);
    const double count = parse_number(parts[3], field);
    if (count < 2 || count != std::floor(count)) {
      throw InvalidParameter(field, "range needs an integer point count >= 2");
    }
    const auto n = static_cast<std::size_t>(count);
    std::vector<double> out(n);
    if (log_spaced) {
      if (!(lo > 0.0) || !(hi > 0.0)) {
        throw InvalidParameter(field, "logspace endpoints must be positive");
      }
      const double a = std::log10(lo);
      const double b = std::log10(hi);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
      out.front() = lo;
      out.back() = hi;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      }
      out.back() = hi;
    }
    return out;
  }
  std::vector<double> out;
  for (auto part : detail::split(spec, ',')) out.push_back(parse_number(part, field));
  return out;
}

// Rounds to integers and drops repeats, keeping first-occurrence order.
inline std::vector<std::int64_t> parse_mode_grid(std::string_view spec, const std::string& field) {
  std::vector<std::int64_t> out;
  for (double v : parse_grid(spec, field)) {
    const double r = std::round(v);
    if (!(r >= 1.0)) throw InvalidParameter(field, "mode counts must be >= 1");
    const auto m = static_cast<std::int64_t>(r);
    if (out.empty() || std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

}  // namespace eabpsk::cli
