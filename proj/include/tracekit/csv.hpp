#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tracekit/errors.hpp"
#include "tracekit/text.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

namespace csv_detail {

inline std::vector<std::string> split_line(std::string_view line, char delim) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

/// Accepts "39,953250" (decimal-comma locale) alongside the canonical dot
/// form. A field with both separators is rejected as ambiguous.
inline double parse_locale_double(const std::string& field,
                                  const std::string& what, std::size_t row) {
  std::string normalized = field;
  const auto commas = std::count(normalized.begin(), normalized.end(), ',');
  if (commas > 0) {
    if (normalized.find('.') != std::string::npos || commas > 1) {
      throw ParseError("ambiguous decimal separators in " + what + " ('" +
                           field + "')",
                       std::nullopt, row);
    }
    normalized[normalized.find(',')] = '.';
  }
  try {
    return parse_double(normalized, what);
  } catch (const ParseError& e) {
    throw ParseError(std::string(e.what()), std::nullopt, row);
  }
}

}  // namespace csv_detail

/// Header of the canonical trace file format.
inline constexpr std::string_view kTraceCsvColumns[] = {
    "record_id", "latitude", "longitude", "satellites", "error_margin_m"};

/// Parses a trace file. The canonical dialect is comma-delimited with dot
/// decimals; a semicolon-delimited dialect with decimal commas (or quoted
/// decimal-comma fields in the canonical dialect) is normalized at ingest.
/// The optional error_margin_m column is retained on the fixes but never
/// used as computed truth.
inline Trace parse_trace_csv(std::string_view content,
                             const GeoPosition& reference,
                             std::string label = {}) {
  reference.validate();
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    const std::size_t nl = content.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < content.size()) lines.push_back(content.substr(start));
      break;
    }
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty() || trim(lines[0]).empty()) {
    throw EmptyInputError("trace file is empty");
  }

  const char delim =
      lines[0].find(';') != std::string_view::npos ? ';' : ',';
  const auto header = csv_detail::split_line(lines[0], delim);
  const bool with_margin = header.size() == 5;
  if (header.size() != 4 && header.size() != 5) {
    throw SchemaError("expected 4 or 5 columns, got " +
                      std::to_string(header.size()));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kTraceCsvColumns[i]) {
      throw SchemaError("column " + std::to_string(i + 1) + " must be '" +
                        std::string(kTraceCsvColumns[i]) + "', got '" +
                        header[i] + "'");
    }
  }

  Trace trace{{}, reference, std::move(label)};
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li + 1;  // 1-based file line
    if (trim(lines[li]).empty()) continue;
    const auto fields = csv_detail::split_line(lines[li], delim);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " has " +
                           std::to_string(fields.size()) + " fields, header " +
                           std::to_string(header.size()),
                       std::nullopt, row);
    }
    GpsFix fix;
    try {
      fix.record_id = parse_int(fields[0], "record_id");
      const std::int64_t sats = parse_int(fields[3], "satellites");
      if (sats < 0) {
        throw ValidationError("row " + std::to_string(row) +
                              ": negative satellite count");
      }
      fix.satellites = static_cast<int>(sats);
    } catch (const ParseError& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what(),
                       std::nullopt, row);
    }
    fix.position.lat_deg =
        csv_detail::parse_locale_double(fields[1], "latitude", row);
    fix.position.lon_deg =
        csv_detail::parse_locale_double(fields[2], "longitude", row);
    if (!fix.position.is_valid()) {
      throw ValidationError("row " + std::to_string(row) +
                            ": latitude/longitude out of range");
    }
    if (with_margin && !fields[4].empty()) {
      fix.published_error_m =
          csv_detail::parse_locale_double(fields[4], "error_margin_m", row);
    }
    if (!trace.fixes.empty() &&
        fix.record_id <= trace.fixes.back().record_id) {
      throw ValidationError("row " + std::to_string(row) +
                            ": record ids must strictly increase");
    }
    trace.fixes.push_back(fix);
  }
  return trace;
}

/// Canonical form: comma delimiter, dot decimals, LF line endings,
/// 6 decimal places for degrees and 2 for meters.
inline std::string write_trace_csv(const Trace& trace) {
  const bool with_margin =
      std::any_of(trace.fixes.begin(), trace.fixes.end(),
                  [](const GpsFix& f) { return f.published_error_m.has_value(); });
  std::string out = "record_id,latitude,longitude,satellites";
  if (with_margin) out += ",error_margin_m";
  out += "\n";
  for (const auto& fix : trace.fixes) {
    out += std::to_string(fix.record_id);
    out += ",";
    out += format_fixed(fix.position.lat_deg, 6);
    out += ",";
    out += format_fixed(fix.position.lon_deg, 6);
    out += ",";
    out += std::to_string(fix.satellites);
    if (with_margin) {
      out += ",";
      if (fix.published_error_m) {
        out += format_fixed(*fix.published_error_m, 2);
      }
    }
    out += "\n";
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

/// Sidecar metadata path of a trace file: clear_weather.csv ->
/// clear_weather.meta.json.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".meta.json");
  return p;
}

struct TraceMeta {
  GeoPosition reference;
  std::string label;
};

inline std::optional<TraceMeta> read_sidecar(
    const std::filesystem::path& csv_path) {
  const auto meta_path = sidecar_path(csv_path);
  if (!std::filesystem::exists(meta_path)) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(read_file(meta_path));
    TraceMeta meta;
    meta.reference.lat_deg = doc.at("reference").at("latitude").get<double>();
    meta.reference.lon_deg = doc.at("reference").at("longitude").get<double>();
    meta.label = doc.value("label", meta_path.stem().string());
    meta.reference.validate();
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("sidecar " + meta_path.string() + ": " + e.what());
  }
}

/// Loads a trace file together with its reference point, taken from the
/// explicit override when given, else from the sidecar metadata file.
inline Trace load_trace(const std::filesystem::path& csv_path,
                        std::optional<GeoPosition> reference = std::nullopt) {
  const auto meta = read_sidecar(csv_path);
  std::string label = meta ? meta->label : csv_path.stem().string();
  if (!reference) {
    if (!meta) {
      throw InvalidArgumentError(
          "no reference point: pass one explicitly or provide " +
          sidecar_path(csv_path).string());
    }
    reference = meta->reference;
  }
  return parse_trace_csv(read_file(csv_path), *reference, std::move(label));
}

/// Writes a trace file plus its sidecar metadata.
inline void save_trace(const std::filesystem::path& csv_path,
                       const Trace& trace) {
  write_file(csv_path, write_trace_csv(trace));
  nlohmann::json meta{
      {"label", trace.label},
      {"reference",
       {{"latitude", trace.reference.lat_deg},
        {"longitude", trace.reference.lon_deg}}},
  };
  write_file(sidecar_path(csv_path), meta.dump(2) + "\n");
}

}  // namespace tracekit
