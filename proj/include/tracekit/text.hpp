#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "tracekit/errors.hpp"

namespace tracekit {

/// Fixed-point decimal rendering, independent of the global locale.
/// min_int_digits left-pads the integer part with zeros (NMEA field widths).
inline std::string format_fixed(double value, int precision,
                                int min_int_digits = 1) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::fixed, precision);
  std::string out(buf, res.ptr);
  std::size_t start = (!out.empty() && out[0] == '-') ? 1 : 0;
  std::size_t dot = out.find('.', start);
  std::size_t int_len = (dot == std::string::npos ? out.size() : dot) - start;
  if (static_cast<int>(int_len) < min_int_digits) {
    out.insert(start, static_cast<std::size_t>(min_int_digits) - int_len, '0');
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

/// Strict decimal parse of the whole field; dot decimal separator only.
inline double parse_double(std::string_view field, const std::string& what) {
  field = trim(field);
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError("unparsable number in " + what + ": '" +
                     std::string(field) + "'");
  }
  return value;
}

inline std::int64_t parse_int(std::string_view field, const std::string& what) {
  field = trim(field);
  std::int64_t value = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError("unparsable integer in " + what + ": '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace tracekit
