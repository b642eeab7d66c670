#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/geo.hpp"

namespace tracekit {

/// Distance-to-reference series, one value per fix, meters.
struct ErrorSeries {
  std::vector<double> values;
  std::string source_label;  // "receiver" | "kalman" | "average"
};

struct ErrorSummary {
  double final_m = 0.0;
  double min_m = 0.0;
  std::size_t min_index = 0;
  std::optional<double> improvement_pct;  // vs a baseline's minimum
};

inline ErrorSeries error_series(std::span<const GeoPosition> positions,
                                const GeoPosition& reference,
                                std::string label = {}) {
  if (positions.empty()) {
    throw EmptyInputError("error_series: no positions");
  }
  ErrorSeries series;
  series.source_label = std::move(label);
  series.values.reserve(positions.size());
  for (const auto& p : positions) {
    series.values.push_back(haversine_distance(p, reference));
  }
  return series;
}

/// Percent reduction of the filtered value over the baseline,
/// 100 * (baseline - filtered) / baseline. Rounded only at display time.
inline double improvement_rate(double baseline_m, double filtered_m) {
  if (!(std::isfinite(baseline_m) && baseline_m > 0.0)) {
    throw InvalidArgumentError("improvement_rate: baseline must be > 0");
  }
  if (!(std::isfinite(filtered_m) && filtered_m >= 0.0)) {
    throw InvalidArgumentError("improvement_rate: filtered must be >= 0");
  }
  return 100.0 * (baseline_m - filtered_m) / baseline_m;
}

/// Final value, minimum (lowest index on ties) and, when a baseline is
/// given, the improvement of this series' minimum over the baseline's.
inline ErrorSummary summarize(const ErrorSeries& series,
                              const ErrorSeries* baseline = nullptr) {
  if (series.values.empty()) {
    throw EmptyInputError("summarize: empty series");
  }
  if (baseline && baseline->values.size() != series.values.size()) {
    throw ShapeError("summarize: baseline length " +
                     std::to_string(baseline->values.size()) +
                     " != series length " +
                     std::to_string(series.values.size()));
  }
  ErrorSummary summary;
  summary.final_m = series.values.back();
  summary.min_m = series.values.front();
  summary.min_index = 0;
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    if (series.values[i] < summary.min_m) {
      summary.min_m = series.values[i];
      summary.min_index = i;
    }
  }
  if (baseline) {
    double baseline_min = baseline->values.front();
    for (double v : baseline->values) baseline_min = std::min(baseline_min, v);
    summary.improvement_pct = improvement_rate(baseline_min, summary.min_m);
  }
  return summary;
}

}  // namespace tracekit
