#pragma once

#include <unistd.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/filters.hpp"
#include "tracekit/geo.hpp"
#include "tracekit/net.hpp"
#include "tracekit/nmea.hpp"
#include "tracekit/report.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

struct TrackConfig {
  Endpoint endpoint;
  GeoPosition reference;
  FilterParams params{};
  std::string label = "live";
};

using TrackCounters = nmea::SkipCounters;

struct TrackResult {
  ReportBundle bundle;
  TrackCounters counters;
};

namespace track_detail {

struct FdGuard {
  int fd;
  explicit FdGuard(int f) : fd(f) {}
  ~FdGuard() {
    if (fd >= 0) ::close(fd);
  }
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
};

}  // namespace track_detail

/// Connects to a replay stream, filters every fix as it arrives, and
/// returns the finished run once the stream closes. When `live_rows` is
/// given, one CSV row per accepted fix (receiver and filtered error in
/// meters) is written and flushed as the fix comes in; the final bundle is
/// numerically identical to an offline run over the same fixes.
///
/// Corrupted, fix-less and foreign sentences are counted and skipped, per
/// reason, in the returned counters. Throws NetworkError when the
/// connection fails and EmptyInputError when the stream closes before the
/// first usable fix.
inline TrackResult track_live(const TrackConfig& config,
                              std::ostream* live_rows = nullptr) {
  config.reference.validate();
  config.params.validate();

  track_detail::FdGuard sock(net_detail::connect_tcp(config.endpoint));

  const std::string label = filter_kind_name(config.params.kind);
  if (live_rows) {
    *live_rows << "record_id,receiver_m," << label << "_m" << std::endl;
  }

  Trace trace;
  trace.reference = config.reference;
  trace.label = config.label;
  TrackCounters counters;
  TraceFilter filter(config.params);

  auto consume_line = [&](std::string_view line) {
    std::optional<GpsFix> fix = nmea::consume_log_line(line, counters);
    if (!fix) return;
    fix->record_id = static_cast<std::int64_t>(trace.size());
    const GeoPosition estimate = filter.push(fix->position);
    if (live_rows) {
      *live_rows << fix->record_id << ','
                 << format_fixed(
                        haversine_distance(fix->position, config.reference), 2)
                 << ','
                 << format_fixed(haversine_distance(estimate, config.reference),
                                 2)
                 << std::endl;
    }
    trace.fixes.push_back(std::move(*fix));
  };

  std::string pending;
  char buffer[4096];
  for (;;) {
    const ssize_t n = ::recv(sock.fd, buffer, sizeof(buffer), 0);
    if (n < 0) {
      throw NetworkError("receive from " + config.endpoint.to_string() +
                         " failed");
    }
    if (n == 0) break;
    pending.append(buffer, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t eol = pending.find('\n', start);
         eol != std::string::npos; eol = pending.find('\n', start)) {
      consume_line(std::string_view(pending).substr(start, eol - start));
      start = eol + 1;
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) consume_line(pending);

  if (trace.empty()) {
    throw EmptyInputError("stream closed before the first usable fix (" +
                          std::to_string(counters.skipped()) +
                          " line(s) skipped)");
  }

  TrackResult result;
  result.bundle = make_bundle(trace, {config.params});
  result.counters = counters;
  return result;
}

}  // namespace tracekit
