#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tracekit/analysis.hpp"
#include "tracekit/errors.hpp"
#include "tracekit/filters.hpp"
#include "tracekit/text.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

/// Everything one experiment run produces: the raw trace, filtered
/// position lists keyed by filter label, and the matching error series and
/// summaries. Label order is preserved for deterministic output.
struct ReportBundle {
  Trace raw_trace;
  std::vector<std::pair<std::string, std::vector<GeoPosition>>> filtered;
  std::vector<std::pair<std::string, ErrorSeries>> series;
  std::vector<std::pair<std::string, ErrorSummary>> summaries;

  void validate() const {
    if (raw_trace.empty()) {
      throw EmptyInputError("report bundle: trace has no fixes");
    }
    for (const auto& [label, positions] : filtered) {
      if (positions.size() != raw_trace.size()) {
        throw ShapeError("filtered series '" + label + "' length mismatch");
      }
    }
    for (const auto& [label, s] : series) {
      if (s.values.size() != raw_trace.size()) {
        throw ShapeError("error series '" + label + "' length mismatch");
      }
    }
  }

  const ErrorSeries* find_series(const std::string& label) const {
    for (const auto& [l, s] : series) {
      if (l == label) return &s;
    }
    return nullptr;
  }

  const ErrorSummary* find_summary(const std::string& label) const {
    for (const auto& [l, s] : summaries) {
      if (l == label) return &s;
    }
    return nullptr;
  }
};

/// Runs the given filters over a trace and assembles the bundle: the
/// receiver series plus, per filter, positions, error series and a summary
/// against the receiver baseline.
inline ReportBundle make_bundle(const Trace& trace,
                                const std::vector<FilterParams>& filters) {
  if (trace.empty()) {
    throw EmptyInputError("make_bundle: trace has no fixes");
  }
  ReportBundle bundle;
  bundle.raw_trace = trace;
  const auto raw_positions = trace.positions();
  const ErrorSeries receiver =
      error_series(raw_positions, trace.reference, "receiver");
  bundle.summaries.emplace_back("receiver", summarize(receiver));
  bundle.series.emplace_back("receiver", receiver);

  for (const auto& params : filters) {
    const std::string label = filter_kind_name(params.kind);
    auto positions = filter_trace(trace, params);
    ErrorSeries s = error_series(positions, trace.reference, label);
    bundle.summaries.emplace_back(label, summarize(s, &receiver));
    bundle.series.emplace_back(label, std::move(s));
    bundle.filtered.emplace_back(label, std::move(positions));
  }
  return bundle;
}

namespace report_detail {

inline nlohmann::json coordinates(const GeoPosition& p) {
  // GeoJSON order: longitude first. Raw doubles, so coordinates
  // round-trip exactly.
  return nlohmann::json::array({p.lon_deg, p.lat_deg});
}

inline nlohmann::json point_feature(const GeoPosition& p,
                                    nlohmann::json properties) {
  return {{"type", "Feature"},
          {"geometry",
           {{"type", "Point"}, {"coordinates", coordinates(p)}}},
          {"properties", std::move(properties)}};
}

}  // namespace report_detail

/// Map overlay of one run: the reference point, every receiver fix, and
/// per filter a LineString track plus its per-fix points.
inline std::string to_geojson(const ReportBundle& bundle) {
  bundle.validate();
  nlohmann::json features = nlohmann::json::array();
  features.push_back(report_detail::point_feature(
      bundle.raw_trace.reference, {{"role", "reference"}}));
  for (const auto& fix : bundle.raw_trace.fixes) {
    features.push_back(report_detail::point_feature(
        fix.position, {{"role", "receiver"},
                       {"record_id", fix.record_id},
                       {"satellites", fix.satellites}}));
  }
  for (const auto& [label, positions] : bundle.filtered) {
    nlohmann::json line = nlohmann::json::array();
    for (const auto& p : positions) {
      line.push_back(report_detail::coordinates(p));
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "LineString"}, {"coordinates", line}}},
         {"properties", {{"role", label}}}});
    for (std::size_t i = 0; i < positions.size(); ++i) {
      features.push_back(report_detail::point_feature(
          positions[i],
          {{"role", label},
           {"record_id", bundle.raw_trace.fixes[i].record_id}}));
    }
  }
  nlohmann::json doc{{"type", "FeatureCollection"},
                     {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

/// Plot data for the error-margin curves: one row per record, one column
/// per series, meters with two decimals.
inline std::string to_series_csv(const ReportBundle& bundle) {
  bundle.validate();
  std::string out = "record_id";
  for (const auto& [label, s] : bundle.series) {
    out += "," + label + "_m";
  }
  out += "\n";
  for (std::size_t i = 0; i < bundle.raw_trace.size(); ++i) {
    out += std::to_string(bundle.raw_trace.fixes[i].record_id);
    for (const auto& [label, s] : bundle.series) {
      out += "," + format_fixed(s.values[i], 2);
    }
    out += "\n";
  }
  return out;
}

}  // namespace tracekit
