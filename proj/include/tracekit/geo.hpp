#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "tracekit/errors.hpp"

namespace tracekit {

/// Mean Earth radius of the spherical model, meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// A latitude/longitude pair in decimal degrees. The unit of all
/// positional math in this library; altitude is not modelled.
struct GeoPosition {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  bool is_valid() const {
    return std::isfinite(lat_deg) && std::isfinite(lon_deg) &&
           lat_deg >= -90.0 && lat_deg <= 90.0 && lon_deg >= -180.0 &&
           lon_deg <= 180.0;
  }

  void validate() const {
    if (!is_valid()) {
      throw ValidationError("position out of range: lat=" +
                            std::to_string(lat_deg) +
                            " lon=" + std::to_string(lon_deg));
    }
  }

  friend bool operator==(const GeoPosition&, const GeoPosition&) = default;
};

inline double deg_to_rad(double deg) {
  return deg * (3.14159265358979323846 / 180.0);
}

/// Great-circle distance between two positions on a sphere of radius
/// kEarthRadiusM, in meters. Haversine form, stable for short distances.
inline double haversine_distance(const GeoPosition& a, const GeoPosition& b) {
  if (!std::isfinite(a.lat_deg) || !std::isfinite(a.lon_deg) ||
      !std::isfinite(b.lat_deg) || !std::isfinite(b.lon_deg)) {
    throw InvalidArgumentError("haversine_distance: non-finite coordinate");
  }
  const double lat1 = deg_to_rad(a.lat_deg);
  const double lat2 = deg_to_rad(b.lat_deg);
  const double dlat = deg_to_rad(b.lat_deg - a.lat_deg);
  const double dlon = deg_to_rad(b.lon_deg - a.lon_deg);

  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  const double h = sin_dlat * sin_dlat +
                   std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace tracekit
