#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/text.hpp"
#include "tracekit/trace.hpp"

namespace tracekit::nmea {

/// XOR checksum of the payload between '$' and '*', as two uppercase hex
/// digits. The payload must not itself contain '$' or '*'.
inline std::string checksum(std::string_view payload) {
  unsigned char acc = 0;
  for (unsigned char c : payload) acc ^= c;
  static const char* hex = "0123456789ABCDEF";
  return {hex[acc >> 4], hex[acc & 0xF]};
}

namespace detail {

/// Strips the frame of a sentence and verifies its checksum; returns the
/// payload between '$' and '*'. Trailing CR/LF is tolerated.
inline std::string_view unframe(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
    line.remove_suffix(1);
  }
  if (line.empty() || line.front() != '$') {
    throw ParseError("sentence does not start with '$'");
  }
  const std::size_t star = line.rfind('*');
  if (star == std::string_view::npos || star + 3 != line.size()) {
    throw ParseError("sentence lacks '*' + two checksum digits");
  }
  std::string_view payload = line.substr(1, star - 1);
  const std::string given{line.substr(star + 1, 2)};
  for (char c : given) {
    if (!((c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'))) {
      throw ParseError("checksum digits must be uppercase hex");
    }
  }
  const std::string expect = checksum(payload);
  if (given != expect) {
    throw ChecksumError("checksum mismatch: got " + given + ", expected " +
                        expect);
  }
  return payload;
}

inline std::vector<std::string_view> split_fields(std::string_view payload) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = payload.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(payload.substr(start));
      break;
    }
    fields.push_back(payload.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

inline std::int64_t pow10(std::size_t n) {
  std::int64_t v = 1;
  while (n--) v *= 10;
  return v;
}

/// [d]ddmm.mmmm -> decimal degrees. deg_digits is 2 for latitude and 3 for
/// longitude. When the minute digits divide evenly by 6, the conversion is
/// done in decimal so that a coordinate that was printed from a decimal
/// degree value parses back to the identical double; otherwise falls back
/// to floating deg + min/60 (worst case well under 1e-7 degrees).
inline double parse_coordinate(std::string_view field, int deg_digits,
                               std::size_t field_index) {
  const auto fail = [&](const std::string& why) -> ParseError {
    return ParseError("coordinate field " + std::to_string(field_index) +
                          ": " + why + " ('" + std::string(field) + "')",
                      field_index);
  };
  if (field.size() < static_cast<std::size_t>(deg_digits) + 2) {
    throw fail("too short");
  }
  const std::string_view deg_part = field.substr(0, deg_digits);
  const std::string_view min_part = field.substr(deg_digits);
  if (!all_digits(deg_part)) throw fail("non-digit degrees");
  const std::size_t dot = min_part.find('.');
  const std::string_view min_int =
      dot == std::string_view::npos ? min_part : min_part.substr(0, dot);
  const std::string_view min_frac =
      dot == std::string_view::npos ? std::string_view{}
                                    : min_part.substr(dot + 1);
  if (min_int.size() != 2 || !all_digits(min_int) ||
      (dot != std::string_view::npos && !all_digits(min_frac))) {
    throw fail("malformed minutes");
  }

  int degrees = 0;
  std::from_chars(deg_part.data(), deg_part.data() + deg_part.size(), degrees);

  if (min_frac.size() <= 12) {
    std::int64_t scaled = 0;  // minutes * 10^frac_digits
    for (char c : min_int) scaled = scaled * 10 + (c - '0');
    for (char c : min_frac) scaled = scaled * 10 + (c - '0');
    if (scaled >= 60 * pow10(min_frac.size())) throw fail("minutes >= 60");
    if (scaled % 6 == 0) {
      // degrees + scaled / (6 * 10^(frac+1)), built as an exact decimal.
      std::string decimal = std::to_string(scaled / 6);
      const std::size_t frac_digits = min_frac.size() + 1;
      if (decimal.size() < frac_digits) {
        decimal.insert(0, frac_digits - decimal.size(), '0');
      }
      const std::string text = std::to_string(degrees) + "." + decimal;
      return parse_double(text, "coordinate");
    }
  }
  const double minutes = parse_double(min_part, "coordinate minutes");
  if (minutes >= 60.0) throw fail("minutes >= 60");
  return static_cast<double>(degrees) + minutes / 60.0;
}

inline std::optional<UtcTime> parse_time(std::string_view field,
                                         std::size_t field_index) {
  if (field.empty()) return std::nullopt;
  const std::size_t dot = field.find('.');
  const std::string_view whole =
      dot == std::string_view::npos ? field : field.substr(0, dot);
  if (whole.size() != 6 || !all_digits(whole) ||
      (dot != std::string_view::npos &&
       !all_digits(field.substr(dot + 1)))) {
    throw ParseError("malformed time field '" + std::string(field) + "'",
                     field_index);
  }
  UtcTime t;
  t.hours = (whole[0] - '0') * 10 + (whole[1] - '0');
  t.minutes = (whole[2] - '0') * 10 + (whole[3] - '0');
  t.seconds = parse_double(field.substr(4), "time seconds");
  if (t.hours > 23 || t.minutes > 59 || t.seconds >= 61.0) {
    throw ParseError("time field out of range '" + std::string(field) + "'",
                     field_index);
  }
  return t;
}

inline double parse_signed_coordinate(std::string_view value,
                                      std::string_view hemi, int deg_digits,
                                      char positive, char negative,
                                      std::size_t value_index) {
  const double magnitude = parse_coordinate(value, deg_digits, value_index);
  if (hemi.size() != 1 || (hemi[0] != positive && hemi[0] != negative)) {
    throw ParseError("hemisphere field " + std::to_string(value_index + 1) +
                         " must be " + std::string(1, positive) + " or " +
                         std::string(1, negative),
                     value_index + 1);
  }
  const double limit = deg_digits == 2 ? 90.0 : 180.0;
  if (magnitude > limit) {
    throw ParseError("coordinate field " + std::to_string(value_index) +
                         " out of range",
                     value_index);
  }
  return hemi[0] == negative ? -magnitude : magnitude;
}

}  // namespace detail

/// Type of the sentence ("GGA", "RMC", ...) after frame and checksum
/// validation. Standard addresses are a 2-char talker + 3-char type.
inline std::string sentence_type(std::string_view line) {
  const std::string_view payload = detail::unframe(line);
  const std::size_t comma = payload.find(',');
  const std::string_view address =
      comma == std::string_view::npos ? payload : payload.substr(0, comma);
  if (address.size() != 5) return std::string(address);
  return std::string(address.substr(2));
}

/// Parses a GGA sentence into a fix (record_id is left 0; the caller
/// assigns stream order). Throws ChecksumError, ParseError with the
/// offending field index, or NoFixError when the quality field is 0.
inline GpsFix parse_gga(std::string_view line) {
  const std::string_view payload = detail::unframe(line);
  const auto fields = detail::split_fields(payload);
  if (fields[0].size() != 5 || fields[0].substr(2) != "GGA") {
    throw ParseError("not a GGA sentence: '" + std::string(fields[0]) + "'",
                     0);
  }
  if (fields.size() < 8) {
    throw ParseError("GGA sentence has " + std::to_string(fields.size()) +
                     " fields, need at least 8");
  }
  if (fields[6] == "0") {
    throw NoFixError("GGA fix quality 0 (no fix)");
  }
  if (!detail::all_digits(fields[6])) {
    throw ParseError("malformed fix quality field", 6);
  }
  GpsFix fix;
  fix.timestamp = detail::parse_time(fields[1], 1);
  fix.position.lat_deg =
      detail::parse_signed_coordinate(fields[2], fields[3], 2, 'N', 'S', 2);
  fix.position.lon_deg =
      detail::parse_signed_coordinate(fields[4], fields[5], 3, 'E', 'W', 4);
  const std::int64_t sats = parse_int(fields[7], "GGA satellite count");
  if (sats < 0) throw ParseError("negative satellite count", 7);
  fix.satellites = static_cast<int>(sats);
  return fix;
}

/// Parses an RMC sentence (position + time; no satellite count, so the fix
/// is reported with 0 satellites). Status 'V' means no valid fix.
inline GpsFix parse_rmc(std::string_view line) {
  const std::string_view payload = detail::unframe(line);
  const auto fields = detail::split_fields(payload);
  if (fields[0].size() != 5 || fields[0].substr(2) != "RMC") {
    throw ParseError("not an RMC sentence: '" + std::string(fields[0]) + "'",
                     0);
  }
  if (fields.size() < 7) {
    throw ParseError("RMC sentence has " + std::to_string(fields.size()) +
                     " fields, need at least 7");
  }
  if (fields[2] == "V") {
    throw NoFixError("RMC status V (void)");
  }
  if (fields[2] != "A") {
    throw ParseError("RMC status must be A or V", 2);
  }
  GpsFix fix;
  fix.timestamp = detail::parse_time(fields[1], 1);
  fix.position.lat_deg =
      detail::parse_signed_coordinate(fields[3], fields[4], 2, 'N', 'S', 3);
  fix.position.lon_deg =
      detail::parse_signed_coordinate(fields[5], fields[6], 3, 'E', 'W', 5);
  return fix;
}

namespace detail {

inline std::string format_coordinate(double value_deg, int deg_digits) {
  double v = value_deg < 0 ? -value_deg : value_deg;
  int degrees = static_cast<int>(v);
  std::string minutes = format_fixed((v - degrees) * 60.0, 6, 2);
  if (minutes.compare(0, 3, "60.") == 0) {  // minutes rounded up to 60
    ++degrees;
    minutes = "00.000000";
  }
  std::string deg_text = std::to_string(degrees);
  if (deg_text.size() < static_cast<std::size_t>(deg_digits)) {
    deg_text.insert(0, deg_digits - deg_text.size(), '0');
  }
  return deg_text + minutes;
}

}  // namespace detail

/// Renders a fix as a GGA sentence, '$' through checksum, no line
/// terminator. Minutes carry six decimals so a parse recovers the
/// coordinate bit-for-bit for values with up to six decimal places.
inline std::string format_gga(const GpsFix& fix) {
  fix.position.validate();
  std::string time_field;
  if (fix.timestamp) {
    time_field = format_fixed(static_cast<double>(fix.timestamp->hours), 0,
                              2) +
                 format_fixed(static_cast<double>(fix.timestamp->minutes), 0,
                              2) +
                 format_fixed(fix.timestamp->seconds, 3, 2);
  }
  std::string payload = "GPGGA," + time_field + ",";
  payload += detail::format_coordinate(fix.position.lat_deg, 2);
  payload += fix.position.lat_deg < 0 ? ",S," : ",N,";
  payload += detail::format_coordinate(fix.position.lon_deg, 3);
  payload += fix.position.lon_deg < 0 ? ",W," : ",E,";
  payload += "1,";
  std::string sats = std::to_string(fix.satellites);
  if (sats.size() < 2) sats.insert(0, 1, '0');
  payload += sats;
  payload += ",,,M,,M,,";
  return "$" + payload + "*" + checksum(payload);
}

/// Dispatches a validated sentence to the matching position parser.
/// Returns nullopt for well-formed sentences of types this toolkit does
/// not consume (the caller counts and skips them).
inline std::optional<GpsFix> parse_position_sentence(std::string_view line) {
  const std::string type = sentence_type(line);
  if (type == "GGA") return parse_gga(line);
  if (type == "RMC") return parse_rmc(line);
  return std::nullopt;
}

/// Lines a sentence log or stream yielded but that carried no fix,
/// bucketed by reason.
struct SkipCounters {
  std::size_t malformed = 0;     // bad framing or unparsable fields
  std::size_t bad_checksum = 0;  // well-framed but checksum mismatch
  std::size_t no_fix = 0;        // receiver reported no valid fix
  std::size_t other_type = 0;    // valid sentence of a type not consumed

  std::size_t corrupted() const { return malformed + bad_checksum; }
  std::size_t skipped() const {
    return malformed + bad_checksum + no_fix + other_type;
  }
};

/// Classifies one log line: a fix, or a counted skip (nullopt). Blank
/// lines are ignored without counting. A glitch never aborts a stream.
inline std::optional<GpsFix> consume_log_line(std::string_view line,
                                              SkipCounters& counters) {
  if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
    return std::nullopt;
  }
  try {
    std::optional<GpsFix> fix = parse_position_sentence(line);
    if (!fix) {
      ++counters.other_type;
      return std::nullopt;
    }
    return fix;
  } catch (const ChecksumError&) {
    ++counters.bad_checksum;
  } catch (const NoFixError&) {
    ++counters.no_fix;
  } catch (const ValidationError&) {
    ++counters.malformed;
  } catch (const ParseError&) {
    ++counters.malformed;
  }
  return std::nullopt;
}

/// Parses a whole sentence log, assigning record ids in arrival order
/// starting at 0 (the trace-table scheme).
inline std::vector<GpsFix> parse_sentence_log(std::string_view content,
                                              SkipCounters& counters) {
  std::vector<GpsFix> fixes;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t nl = content.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start >= content.size()) break;
      nl = content.size();
    }
    if (auto fix = consume_log_line(content.substr(start, nl - start),
                                    counters)) {
      fix->record_id = static_cast<std::int64_t>(fixes.size());
      fixes.push_back(std::move(*fix));
    }
    start = nl + 1;
  }
  return fixes;
}

}  // namespace tracekit::nmea
