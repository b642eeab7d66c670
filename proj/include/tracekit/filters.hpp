#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/geo.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

enum class FilterKind { kalman, average };

inline const char* filter_kind_name(FilterKind k) {
  return k == FilterKind::kalman ? "kalman" : "average";
}

/// Filter configuration. The defaults (R = 1, P0 = 4) are the receiver
/// post-processing configuration the rest of the toolkit reproduces.
struct FilterParams {
  double r = 1.0;
  double p0 = 4.0;
  FilterKind kind = FilterKind::kalman;

  void validate() const {
    if (!(std::isfinite(r) && r > 0.0)) {
      throw InvalidArgumentError("filter parameter r must be > 0");
    }
    if (!(std::isfinite(p0) && p0 > 0.0)) {
      throw InvalidArgumentError("filter parameter p0 must be > 0");
    }
  }
};

/// Scalar Kalman filter state for one axis, constant-value model with no
/// process noise. The error covariance decays monotonically; the gain is
/// recomputed from it at every step.
struct KalmanState {
  double x_est = 0.0;   ///< current estimate, degrees
  double p_cov = 0.0;   ///< error covariance
  double r = 1.0;       ///< measurement noise parameter
  std::optional<double> k_gain;  ///< gain of the last step, in (0,1)
};

/// Cumulative-average filter state for one axis: running sum and count.
struct AverageState {
  double total = 0.0;
  std::size_t count = 0;
};

inline KalmanState kalman_init(double x0, const FilterParams& params = {}) {
  params.validate();
  if (!std::isfinite(x0)) {
    throw InvalidArgumentError("kalman_init: non-finite initial value");
  }
  return KalmanState{x0, params.p0, params.r, std::nullopt};
}

/// One measurement update. Gain from the prior covariance, estimate as a
/// convex blend of measurement and previous estimate, then the covariance
/// contraction. Returns the new estimate.
inline double kalman_step(KalmanState& state, double z) {
  if (!std::isfinite(z)) {
    throw InvalidArgumentError("kalman_step: non-finite measurement");
  }
  const double p_prior = state.p_cov;
  const double x_prior = state.x_est;
  const double gain = p_prior / (p_prior + state.r);
  state.x_est = gain * z + (1.0 - gain) * x_prior;
  state.p_cov = (1.0 - gain) * p_prior;
  state.k_gain = gain;
  return state.x_est;
}

/// One cumulative-average update: the estimate is the arithmetic mean of
/// every measurement consumed so far. Returns the new estimate.
inline double average_step(AverageState& state, double z) {
  if (!std::isfinite(z)) {
    throw InvalidArgumentError("average_step: non-finite measurement");
  }
  state.total += z;
  state.count += 1;
  return state.total / static_cast<double>(state.count);
}

/// Applies one filter configuration to a stream of positions, latitude and
/// longitude through independent per-axis states. Incremental so that live
/// tracking and whole-trace filtering share the exact same operation order.
class TraceFilter {
 public:
  explicit TraceFilter(const FilterParams& params) : params_(params) {
    params_.validate();
  }

  const FilterParams& params() const { return params_; }
  std::size_t consumed() const { return consumed_; }

  /// Consumes one observed position and returns the recombined estimate.
  /// For the Kalman kind the first observation also seeds the state and is
  /// then consumed as a measurement like every later one.
  GeoPosition push(const GeoPosition& observed) {
    if (params_.kind == FilterKind::kalman) {
      if (consumed_ == 0) {
        lat_kalman_ = kalman_init(observed.lat_deg, params_);
        lon_kalman_ = kalman_init(observed.lon_deg, params_);
      }
      ++consumed_;
      return GeoPosition{kalman_step(*lat_kalman_, observed.lat_deg),
                         kalman_step(*lon_kalman_, observed.lon_deg)};
    }
    ++consumed_;
    return GeoPosition{average_step(lat_average_, observed.lat_deg),
                       average_step(lon_average_, observed.lon_deg)};
  }

 private:
  FilterParams params_;
  std::size_t consumed_ = 0;
  std::optional<KalmanState> lat_kalman_;
  std::optional<KalmanState> lon_kalman_;
  AverageState lat_average_;
  AverageState lon_average_;
};

/// Filters a whole trace; output k is the estimate after consuming fix k.
inline std::vector<GeoPosition> filter_trace(const Trace& trace,
                                             const FilterParams& params) {
  if (trace.empty()) {
    throw EmptyInputError("filter_trace: trace has no fixes");
  }
  TraceFilter filter(params);
  std::vector<GeoPosition> out;
  out.reserve(trace.size());
  for (const auto& fix : trace.fixes) {
    out.push_back(filter.push(fix.position));
  }
  return out;
}

}  // namespace tracekit
