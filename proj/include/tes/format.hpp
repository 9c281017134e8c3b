#pragma once

// Deterministic number formatting and strict parsing shared by the config
// serializer and the CSV writers.

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace tes {

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Parses a whole string as a double; rejects trailing garbage.
inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(what + ": not a number: '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s, const std::string& what) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(what + ": not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace tes
