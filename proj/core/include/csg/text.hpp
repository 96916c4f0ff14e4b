#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <system_error>

namespace csg {

/// Shortest decimal form that parses back to the same double. All file
/// formats use this so reruns are byte-comparable.
[[nodiscard]] inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Exact bit-preserving form (hex floats) for checkpoints.
[[nodiscard]] inline std::string format_double_exact(double x) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%a", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

[[nodiscard]] inline double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) throw std::invalid_argument("not a number: " + text);
  return v;
}

}  // namespace csg
