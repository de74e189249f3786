#pragma once

#include <charconv>
#include <string>

namespace tnt::detail {

// Shortest decimal form that parses back to the same double; independent of
// locale, so CSV output is byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, r.ptr);
}

}  // namespace tnt::detail
