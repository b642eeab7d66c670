#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/geo.hpp"

namespace tracekit {

/// Time of day in UTC as carried by NMEA sentences (no date part).
struct UtcTime {
  int hours = 0;
  int minutes = 0;
  double seconds = 0.0;

  friend bool operator==(const UtcTime&, const UtcTime&) = default;
};

/// One receiver record. A fix is "usable" once the receiver talks to at
/// least three satellites; fixes below that are kept but flagged.
struct GpsFix {
  std::int64_t record_id = 0;
  GeoPosition position;
  int satellites = 0;
  std::optional<UtcTime> timestamp;
  /// Error-margin column of an ingested trace file, if present. Kept for
  /// cross-checking only; never fed back into computed results.
  std::optional<double> published_error_m;

  bool usable() const { return satellites >= 3; }
};

/// An ordered list of fixes plus the surveyed ground-truth position.
struct Trace {
  std::vector<GpsFix> fixes;
  GeoPosition reference;
  std::string label;

  bool empty() const { return fixes.empty(); }
  std::size_t size() const { return fixes.size(); }

  std::vector<GeoPosition> positions() const {
    std::vector<GeoPosition> out;
    out.reserve(fixes.size());
    for (const auto& f : fixes) out.push_back(f.position);
    return out;
  }

  /// Copy containing only fixes with >= 3 satellites.
  Trace usable_only() const {
    Trace out{{}, reference, label};
    for (const auto& f : fixes)
      if (f.usable()) out.fixes.push_back(f);
    return out;
  }

  /// Checks reference and fix positions, and that record ids strictly
  /// increase.
  void validate() const {
    reference.validate();
    const GpsFix* prev = nullptr;
    for (const auto& f : fixes) {
      f.position.validate();
      if (f.record_id < 0) {
        throw ValidationError("negative record id " +
                              std::to_string(f.record_id));
      }
      if (prev && f.record_id <= prev->record_id) {
        throw ValidationError("record ids not strictly increasing at id " +
                              std::to_string(f.record_id));
      }
      prev = &f;
    }
  }
};

}  // namespace tracekit
