// tracekit: reproduce the clear-weather GPS smoothing experiment from the
// command line. Subcommands cover file ingest, filtering, analysis, map
// export and the TCP replay/track pair.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracekit/tracekit.hpp"

namespace {

using namespace tracekit;

bool verbose() {
  const char* env = std::getenv("TRACEKIT_VERBOSE");
  return env != nullptr && *env != '\0' && std::string(env) != "0";
}

void note(const std::string& message) {
  if (verbose()) std::cerr << "tracekit: " << message << '\n';
}

GeoPosition parse_ref(const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    throw InvalidArgumentError("--ref must be lat,lon, got '" + text + "'");
  }
  GeoPosition ref;
  try {
    ref.lat_deg = parse_double(text.substr(0, comma), "--ref latitude");
    ref.lon_deg = parse_double(text.substr(comma + 1), "--ref longitude");
  } catch (const ParseError& e) {
    throw InvalidArgumentError(e.what());
  }
  try {
    ref.validate();
  } catch (const ValidationError& e) {
    throw InvalidArgumentError(e.what());
  }
  return ref;
}

std::optional<GeoPosition> optional_ref(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  return parse_ref(flag);
}

/// "-" means stdout.
void emit(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  write_file(path, content);
  note("wrote " + path);
}

FilterKind parse_kind(const std::string& name) {
  if (name == "kalman") return FilterKind::kalman;
  if (name == "average") return FilterKind::average;
  throw InvalidArgumentError("--kind must be kalman or average, got '" +
                             name + "'");
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void print_summary_table(std::ostream& out, const ReportBundle& bundle) {
  out << pad_right("series", 10) << pad_left("final_m", 9)
      << pad_left("min_m", 9) << pad_left("min_rec", 9)
      << pad_left("improvement", 13) << '\n';
  for (const auto& [label, s] : bundle.summaries) {
    out << pad_right(label, 10) << pad_left(format_fixed(s.final_m, 2), 9)
        << pad_left(format_fixed(s.min_m, 2), 9)
        << pad_left(std::to_string(
                        bundle.raw_trace.fixes[s.min_index].record_id),
                    9)
        << pad_left(s.improvement_pct
                        ? format_fixed(*s.improvement_pct, 2) + "%"
                        : "-",
                    13)
        << '\n';
  }
}

void print_trace_heading(std::ostream& out, const Trace& trace) {
  out << "trace     : " << trace.label << " (" << trace.size() << " fixes)\n"
      << "reference : " << format_fixed(trace.reference.lat_deg, 7) << ","
      << format_fixed(trace.reference.lon_deg, 7) << '\n';
}

struct CommonOpts {
  std::string input;
  std::string output = "-";
  std::string ref;
  std::string label;
  FilterParams params;
  std::string kind = "kalman";
};

Trace load_input(const CommonOpts& opts, bool need_reference = true) {
  Trace trace;
  if (need_reference) {
    trace = load_trace(opts.input, optional_ref(opts.ref));
  } else {
    // Replay does not use the reference; fall back to 0,0 when the trace
    // file carries none.
    try {
      trace = load_trace(opts.input, optional_ref(opts.ref));
    } catch (const InvalidArgumentError&) {
      trace = load_trace(opts.input, GeoPosition{0.0, 0.0});
    }
  }
  if (!opts.label.empty()) trace.label = opts.label;
  note("loaded " + std::to_string(trace.size()) + " fixes from " +
       opts.input);
  return trace;
}

std::vector<FilterParams> both_filters(const FilterParams& base) {
  FilterParams kalman = base;
  kalman.kind = FilterKind::kalman;
  FilterParams average = base;
  average.kind = FilterKind::average;
  return {kalman, average};
}

int run_ingest(const CommonOpts& opts, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto") {
    const std::string ext =
        std::filesystem::path(opts.input).extension().string();
    fmt = (ext == ".csv") ? "csv" : "nmea";
  }

  Trace trace;
  if (fmt == "csv") {
    trace = load_input(opts);
  } else if (fmt == "nmea") {
    const auto ref = optional_ref(opts.ref);
    if (!ref) {
      throw InvalidArgumentError(
          "--ref is required when ingesting NMEA sentences");
    }
    nmea::SkipCounters counters;
    trace.fixes = nmea::parse_sentence_log(read_file(opts.input), counters);
    trace.reference = *ref;
    trace.label = opts.label.empty()
                      ? std::filesystem::path(opts.input).stem().string()
                      : opts.label;
    if (trace.empty()) {
      throw EmptyInputError("no position fixes in " + opts.input + " (" +
                            std::to_string(counters.skipped()) +
                            " line(s) skipped)");
    }
    std::cerr << "ingested " << trace.size() << " fixes, skipped "
              << counters.skipped() << " line(s) (" << counters.corrupted()
              << " corrupted, " << counters.no_fix << " no-fix, "
              << counters.other_type << " other)\n";
  } else {
    throw InvalidArgumentError("--format must be auto, nmea or csv");
  }

  if (opts.output == "-") {
    std::cout << write_trace_csv(trace);
  } else {
    save_trace(opts.output, trace);
    note("wrote " + opts.output + " and " +
         sidecar_path(opts.output).string());
  }
  return 0;
}

int run_filter(const CommonOpts& opts) {
  FilterParams params = opts.params;
  params.kind = parse_kind(opts.kind);
  const Trace trace = load_input(opts);
  const auto positions = filter_trace(trace, params);

  Trace filtered = trace;
  filtered.label = trace.label + " (" + filter_kind_name(params.kind) + ")";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    filtered.fixes[i].position = positions[i];
    filtered.fixes[i].published_error_m =
        haversine_distance(positions[i], trace.reference);
  }
  if (opts.output == "-") {
    std::cout << write_trace_csv(filtered);
  } else {
    save_trace(opts.output, filtered);
  }
  return 0;
}

int run_analyze(const CommonOpts& opts, const std::string& series_out) {
  const Trace trace = load_input(opts);
  const ReportBundle bundle = make_bundle(trace, both_filters(opts.params));
  print_trace_heading(std::cout, trace);
  std::cout << "params    : R=" << format_fixed(opts.params.r, 2)
            << " P0=" << format_fixed(opts.params.p0, 2) << "\n\n";
  print_summary_table(std::cout, bundle);
  if (!series_out.empty()) emit(series_out, to_series_csv(bundle));
  return 0;
}

int run_geojson(const CommonOpts& opts) {
  const Trace trace = load_input(opts);
  const ReportBundle bundle = make_bundle(trace, both_filters(opts.params));
  emit(opts.output, to_geojson(bundle));
  return 0;
}

int run_replay(const CommonOpts& opts, const std::string& listen,
               double rate_hz, bool loop) {
  ReplayConfig config;
  config.endpoint = parse_endpoint(listen);
  config.rate_hz = rate_hz;
  config.loop = loop;

  ReplayServer server(load_input(opts, /*need_reference=*/false), config);
  server.start();
  std::cerr << "replaying on " << server.endpoint().to_string() << " at "
            << format_fixed(rate_hz, 3) << " Hz"
            << (loop ? ", looping" : "") << " (Ctrl-C to stop)\n";
  server.wait();
  return 0;
}

int run_track(const CommonOpts& opts, const std::string& connect,
              const std::string& series_out, const std::string& geojson_out) {
  TrackConfig config;
  config.endpoint = parse_endpoint(connect);
  config.reference = parse_ref(opts.ref);
  config.params = opts.params;
  config.params.kind = parse_kind(opts.kind);
  if (!opts.label.empty()) config.label = opts.label;

  std::ofstream file_sink;
  std::ostream* sink = &std::cout;
  if (!series_out.empty()) {
    file_sink.open(series_out, std::ios::binary);
    if (!file_sink) throw IoError("cannot write " + series_out);
    sink = &file_sink;
  }

  const TrackResult result = track_live(config, sink);
  std::cerr << "received " << result.bundle.raw_trace.size()
            << " fixes, skipped " << result.counters.skipped()
            << " line(s) (" << result.counters.corrupted() << " corrupted, "
            << result.counters.no_fix << " no-fix, "
            << result.counters.other_type << " other)\n";
  print_summary_table(std::cerr, result.bundle);
  if (!geojson_out.empty()) emit(geojson_out, to_geojson(result.bundle));
  return 0;
}

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0   success\n"
    "  2   invalid arguments or flags\n"
    "  3   parse failure (malformed sentence, field or number)\n"
    "  4   NMEA checksum mismatch\n"
    "  5   receiver reported no fix\n"
    "  6   trace file schema mismatch\n"
    "  7   value out of valid range\n"
    "  8   empty input\n"
    "  9   series length mismatch\n"
    "  10  file i/o failure\n"
    "  11  network failure\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "GPS trace enhancement toolkit: scalar Kalman and cumulative-average "
      "smoothing of position fixes, error-margin analysis against a "
      "surveyed reference, GeoJSON export, and a TCP replay/track pair."};
  app.set_version_flag("--version", "tracekit 1.0.0");
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string format = "auto";
  std::string series_out;
  std::string geojson_out;
  std::string listen = "127.0.0.1:10110";
  std::string connect;
  double rate_hz = 1.0;
  bool loop = false;

  const auto add_input = [&](CLI::App* sub) {
    sub->add_option("-i,--input", opts.input, "input file")->required();
  };
  const auto add_ref = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option(
        "--ref", opts.ref,
        "reference point as lat,lon (defaults to sidecar metadata)");
    if (required) o->required();
  };
  const auto add_params = [&](CLI::App* sub) {
    sub->add_option("--r", opts.params.r,
                    "measurement noise R (default 1)");
    sub->add_option("--p0", opts.params.p0,
                    "initial error covariance P0 (default 4)");
  };
  const auto add_kind = [&](CLI::App* sub) {
    sub->add_option("--kind", opts.kind, "kalman or average (default kalman)");
  };

  int rc = 0;

  auto* ingest = app.add_subcommand(
      "ingest", "read NMEA sentences or a trace file, write canonical CSV");
  add_input(ingest);
  ingest->add_option("-o,--output", opts.output,
                     "output trace file, - for stdout (default)");
  ingest->add_option("--format", format, "auto, nmea or csv (default auto)");
  ingest->add_option("--label", opts.label, "trace label for the sidecar");
  add_ref(ingest, false);
  ingest->callback([&] { rc = run_ingest(opts, format); });

  auto* filter = app.add_subcommand(
      "filter", "write a trace with filtered positions and recomputed "
                "error margins");
  add_input(filter);
  filter->add_option("-o,--output", opts.output,
                     "output trace file, - for stdout (default)");
  add_kind(filter);
  add_params(filter);
  add_ref(filter, false);
  filter->callback([&] { rc = run_filter(opts); });

  auto* analyze = app.add_subcommand(
      "analyze", "print the receiver/kalman/average comparison table");
  add_input(analyze);
  analyze->add_option("--series-out", series_out,
                      "also write the per-record error series CSV");
  add_params(analyze);
  add_ref(analyze, false);
  analyze->callback([&] { rc = run_analyze(opts, series_out); });

  auto* geojson = app.add_subcommand(
      "geojson", "write the map overlay (reference, fixes, filtered tracks)");
  add_input(geojson);
  geojson->add_option("-o,--output", opts.output,
                      "output file, - for stdout (default)");
  add_params(geojson);
  add_ref(geojson, false);
  geojson->callback([&] { rc = run_geojson(opts); });

  auto* replay = app.add_subcommand(
      "replay", "serve a trace as a live NMEA stream over TCP");
  add_input(replay);
  replay->add_option("--listen", listen,
                     "listen endpoint (default 127.0.0.1:10110)");
  replay->add_option("--rate", rate_hz, "sentences per second (default 1)");
  replay->add_flag("--loop", loop, "restart from the first fix at the end");
  add_ref(replay, false);
  replay->callback([&] { rc = run_replay(opts, listen, rate_hz, loop); });

  auto* track = app.add_subcommand(
      "track", "connect to a replay stream, filter live, report at the end");
  track->add_option("--connect", connect, "server endpoint host:port")
      ->required();
  add_ref(track, true);
  add_kind(track);
  add_params(track);
  track->add_option("--label", opts.label, "trace label for the report");
  track->add_option("--series-out", series_out,
                    "write per-fix error rows here instead of stdout");
  track->add_option("--geojson", geojson_out,
                    "also write a map overlay of the finished run");
  track->callback(
      [&] { rc = run_track(opts, connect, series_out, geojson_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(errc::invalid_argument);
  } catch (const Error& e) {
    std::cerr << "tracekit: error (" << errc_name(e.code()) << "): "
              << e.what() << '\n';
    return e.exit_code();
  }
  return rc;
}
