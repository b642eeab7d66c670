#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "support/clear_weather.hpp"
#include "tracekit/csv.hpp"
#include "tracekit/net.hpp"
#include "tracekit/nmea.hpp"
#include "tracekit/replay.hpp"
#include "tracekit/report.hpp"

using namespace tracekit;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("tracekit_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  return std::filesystem::exists(p) ? read_file(p) : std::string{};
}

// Runs the installed binary through the shell, capturing both streams.
RunResult run_cli(const std::string& args) {
  const auto out_path = scratch_dir() / "stdout.txt";
  const auto err_path = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(TRACEKIT_CLI_PATH) + " " + args +
                          " >" + out_path.string() + " 2>" +
                          err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string bundled() { return testsupport::bundled_trace_path(); }

const char* kRefFlag = "--ref 39.9525646,32.7966589";

}  // namespace

TEST(Cli, HelpDocumentsExitCodes) {
  const RunResult r = run_cli("--help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("Exit codes"), std::string::npos);
  EXPECT_NE(r.out.find("11  network failure"), std::string::npos);
  for (const char* sub :
       {"ingest", "filter", "analyze", "geojson", "replay", "track"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, VersionFlag) {
  const RunResult r = run_cli("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("tracekit"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("analyze --nope").exit_code, 2);
  EXPECT_EQ(run_cli("analyze").exit_code, 2);  // --input missing
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("analyze -i " + bundled() + " --ref 95,32").exit_code, 2);
}

TEST(Cli, AnalyzeBundledDataset) {
  const RunResult r = run_cli("analyze -i " + bundled());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("clear weather (30 fixes)"), std::string::npos);
  EXPECT_NE(r.out.find("39.9525646,32.7966589"), std::string::npos);

  // Receiver settles at 9.40 m; Kalman bottoms out at 3.51 m in record 21
  // (62.6% below the receiver minimum); the average ends at 4.18 m.
  EXPECT_NE(r.out.find("receiver"), std::string::npos);
  EXPECT_NE(r.out.find("9.40"), std::string::npos);
  EXPECT_NE(r.out.find("kalman"), std::string::npos);
  EXPECT_NE(r.out.find("3.61"), std::string::npos);
  EXPECT_NE(r.out.find("3.51"), std::string::npos);
  EXPECT_NE(r.out.find("21"), std::string::npos);
  EXPECT_NE(r.out.find("62.63%"), std::string::npos);
  EXPECT_NE(r.out.find("average"), std::string::npos);
  EXPECT_NE(r.out.find("4.18"), std::string::npos);
  EXPECT_NE(r.out.find("55.49%"), std::string::npos);
}

TEST(Cli, ExplicitReferenceMatchesSidecar) {
  const RunResult with_sidecar = run_cli("analyze -i " + bundled());
  const RunResult with_flag =
      run_cli("analyze -i " + bundled() + " " + kRefFlag);
  EXPECT_EQ(with_flag.exit_code, 0);
  EXPECT_EQ(with_flag.out, with_sidecar.out);
}

TEST(Cli, DefaultsEqualExplicitParams) {
  const RunResult implicit = run_cli("analyze -i " + bundled());
  const RunResult explicit_flags =
      run_cli("analyze -i " + bundled() + " --r 1 --p0 4");
  EXPECT_EQ(explicit_flags.out, implicit.out);
}

TEST(Cli, AnalyzeIsDeterministic) {
  const RunResult a = run_cli("analyze -i " + bundled());
  const RunResult b = run_cli("analyze -i " + bundled());
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, SeriesOutWritesThePlotCsv) {
  const auto path = scratch_dir() / "series.csv";
  const RunResult r = run_cli("analyze -i " + bundled() + " --series-out " +
                              path.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string csv = slurp(path);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "record_id,receiver_m,kalman_m,average_m");
  EXPECT_NE(csv.find("\n29,9.40,3.61,4.18\n"), std::string::npos);
}

TEST(Cli, FilterAverageThenAnalyze) {
  const auto path = scratch_dir() / "averaged.csv";
  const RunResult filter = run_cli("filter -i " + bundled() +
                                   " --kind average -o " + path.string());
  ASSERT_EQ(filter.exit_code, 0) << filter.err;
  ASSERT_TRUE(std::filesystem::exists(sidecar_path(path)));

  const RunResult analyze = run_cli("analyze -i " + path.string());
  ASSERT_EQ(analyze.exit_code, 0) << analyze.err;
  // The averaged trace's own receiver series ends at 4.18 m.
  const std::size_t at = analyze.out.find("\nreceiver");
  ASSERT_NE(at, std::string::npos) << analyze.out;
  const std::string row =
      analyze.out.substr(at + 1, analyze.out.find('\n', at + 1) - at - 1);
  EXPECT_NE(row.find("4.18"), std::string::npos) << row;
}

TEST(Cli, FilterToStdoutKeepsTheSchema) {
  const RunResult r = run_cli("filter -i " + bundled() + " --kind kalman");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "record_id,latitude,longitude,satellites,error_margin_m");
  // First estimate is the raw first fix, so its margin stays 80.22.
  EXPECT_NE(r.out.find("\n0,39.953250,32.796365,3,80.22\n"),
            std::string::npos);
}

TEST(Cli, GeoJsonOverlay) {
  const auto path = scratch_dir() / "map.geojson";
  const RunResult r =
      run_cli("geojson -i " + bundled() + " -o " + path.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(doc.at("type"), "FeatureCollection");
  EXPECT_EQ(doc.at("features").size(), 93u);

  const RunResult again =
      run_cli("geojson -i " + bundled() + " -o " + path.string());
  EXPECT_EQ(nlohmann::json::parse(slurp(path)), doc);
}

TEST(Cli, IngestNmeaLog) {
  const Trace trace = testsupport::clear_weather_trace();
  std::string log;
  for (int i = 0; i < 3; ++i) {
    log += nmea::format_gga(trace.fixes[i]) + "\r\n";
  }
  log += "$GPGGA,garbage*00\r\n";
  log += "$GPGSV,3,1,11,03,03,111,00*4A\r\n";
  const auto nmea_path = scratch_dir() / "session.nmea";
  write_file(nmea_path, log);

  const auto out_path = scratch_dir() / "session.csv";
  const RunResult r = run_cli("ingest -i " + nmea_path.string() + " " +
                              kRefFlag + " -o " + out_path.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.err.find("ingested 3 fixes, skipped 2"), std::string::npos)
      << r.err;

  const Trace back = load_trace(out_path);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back.reference, testsupport::kReference);
  EXPECT_EQ(back.fixes[2].position.lat_deg, trace.fixes[2].position.lat_deg);
}

TEST(Cli, IngestNmeaWithoutRefExitsTwo) {
  const auto nmea_path = scratch_dir() / "noref.nmea";
  write_file(nmea_path,
             nmea::format_gga(testsupport::clear_weather_trace().fixes[0]) +
                 "\r\n");
  EXPECT_EQ(run_cli("ingest -i " + nmea_path.string()).exit_code, 2);
}

TEST(Cli, IngestWithNoUsableSentencesExitsEight) {
  const auto nmea_path = scratch_dir() / "junk.nmea";
  write_file(nmea_path, "not nmea\nstill not nmea\n");
  const RunResult r =
      run_cli("ingest -i " + nmea_path.string() + " " + kRefFlag);
  EXPECT_EQ(r.exit_code, 8);
  EXPECT_NE(r.err.find("empty-input"), std::string::npos) << r.err;
}

TEST(Cli, ErrorClassesMapToExitCodes) {
  const auto dir = scratch_dir();

  const auto header_only = dir / "empty.csv";
  write_file(header_only, "record_id,latitude,longitude,satellites\n");
  const RunResult empty = run_cli("analyze -i " + header_only.string() + " " +
                                  kRefFlag);
  EXPECT_EQ(empty.exit_code, 8);
  EXPECT_NE(empty.err.find("empty-input"), std::string::npos) << empty.err;

  const auto zero_byte = dir / "zero.csv";
  write_file(zero_byte, "");
  EXPECT_EQ(
      run_cli("analyze -i " + zero_byte.string() + " " + kRefFlag).exit_code,
      8);

  EXPECT_EQ(
      run_cli(std::string("analyze -i /no/such/file.csv ") + kRefFlag)
          .exit_code,
      10);

  const auto bad_header = dir / "schema.csv";
  write_file(bad_header, "a,b,c,d\n1,2,3,4\n");
  EXPECT_EQ(
      run_cli("analyze -i " + bad_header.string() + " " + kRefFlag).exit_code,
      6);

  const auto bad_number = dir / "badnum.csv";
  write_file(bad_number,
             "record_id,latitude,longitude,satellites\n0,abc,32.79,3\n");
  EXPECT_EQ(
      run_cli("analyze -i " + bad_number.string() + " " + kRefFlag).exit_code,
      3);

  const auto bad_range = dir / "range.csv";
  write_file(bad_range,
             "record_id,latitude,longitude,satellites\n0,95.0,32.79,3\n");
  EXPECT_EQ(
      run_cli("analyze -i " + bad_range.string() + " " + kRefFlag).exit_code,
      7);

  const auto no_sidecar = dir / "bare.csv";
  write_file(no_sidecar,
             "record_id,latitude,longitude,satellites\n0,39.95,32.79,3\n");
  EXPECT_EQ(run_cli("analyze -i " + no_sidecar.string()).exit_code, 2);
}

TEST(Cli, TrackAgainstAReplayServer) {
  const Trace trace = testsupport::clear_weather_trace();
  ReplayConfig cfg;
  cfg.rate_hz = 200.0;
  ReplayServer server(trace, cfg);
  server.start();

  const RunResult r = run_cli("track --connect 127.0.0.1:" +
                              std::to_string(server.port()) + " " + kRefFlag);
  server.stop();
  ASSERT_EQ(r.exit_code, 0) << r.err;

  FilterParams params;
  const std::string expected =
      to_series_csv(make_bundle(trace, {params}));
  EXPECT_EQ(r.out, expected);
  EXPECT_NE(r.err.find("received 30 fixes, skipped 0"), std::string::npos)
      << r.err;
  EXPECT_NE(r.err.find("3.51"), std::string::npos);
}

TEST(Cli, TrackRefusedConnectionExitsEleven) {
  auto [fd, port] = net_detail::listen_tcp({"127.0.0.1", 0});
  ::close(fd);
  const RunResult r = run_cli("track --connect 127.0.0.1:" +
                              std::to_string(port) + " " + kRefFlag);
  EXPECT_EQ(r.exit_code, 11);
  EXPECT_NE(r.err.find("network"), std::string::npos) << r.err;
}

TEST(Cli, ReplayServesAStreamUntilKilled) {
  const auto err_path = scratch_dir() / "replay_err.txt";
  const std::string cmd = std::string(TRACEKIT_CLI_PATH) + " replay -i " +
                          bundled() +
                          " --listen 127.0.0.1:0 --rate 500 --loop 2>" +
                          err_path.string() + " & echo $!";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char pid_buf[32] = {};
  ASSERT_NE(fgets(pid_buf, sizeof(pid_buf), pipe), nullptr);
  pclose(pipe);
  const pid_t pid = static_cast<pid_t>(std::atol(pid_buf));
  ASSERT_GT(pid, 0);

  // The server prints its bound endpoint once it listens.
  std::string banner;
  for (int i = 0; i < 100 && banner.find("replaying on") == std::string::npos;
       ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    banner = slurp(err_path);
  }
  ASSERT_NE(banner.find("replaying on 127.0.0.1:"), std::string::npos)
      << banner;
  const std::size_t at = banner.find("127.0.0.1:") + 10;
  const int port = std::atoi(banner.c_str() + at);
  ASSERT_GT(port, 0);

  const int fd =
      net_detail::connect_tcp({"127.0.0.1", static_cast<std::uint16_t>(port)});
  std::string got;
  char buf[2048];
  while (got.size() < 35u * 56u) {
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n <= 0) break;
    got.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fd);
  ::kill(pid, SIGTERM);

  std::size_t lines = 0;
  std::size_t start = 0;
  for (std::size_t nl = got.find("\r\n"); nl != std::string::npos;
       nl = got.find("\r\n", start)) {
    EXPECT_TRUE(nmea::parse_position_sentence(
                    std::string_view(got).substr(start, nl - start))
                    .has_value());
    start = nl + 2;
    ++lines;
  }
  EXPECT_GT(lines, 30u);  // looped past one full trace
}
