#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tracekit {

/// Error categories. The numeric value doubles as the CLI exit code,
/// so every failure class is distinguishable from a script.
enum class errc : int {
  invalid_argument = 2,
  parse = 3,
  checksum = 4,
  no_fix = 5,
  schema = 6,
  validation = 7,
  empty_input = 8,
  shape_mismatch = 9,
  io = 10,
  network = 11,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::parse: return "parse";
    case errc::checksum: return "checksum";
    case errc::no_fix: return "no-fix";
    case errc::schema: return "schema";
    case errc::validation: return "validation";
    case errc::empty_input: return "empty-input";
    case errc::shape_mismatch: return "shape-mismatch";
    case errc::io: return "io";
    case errc::network: return "network";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  errc code_;
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& what)
      : Error(errc::invalid_argument, what) {}
};

/// Malformed input text. Carries the 0-based field index (NMEA sentences,
/// counted from the address field) and/or the 1-based row (CSV) when known.
struct ParseError : Error {
  explicit ParseError(const std::string& what,
                      std::optional<std::size_t> field = std::nullopt,
                      std::optional<std::size_t> row = std::nullopt)
      : Error(errc::parse, what), field_index(field), row_number(row) {}

  std::optional<std::size_t> field_index;
  std::optional<std::size_t> row_number;
};

struct ChecksumError : Error {
  explicit ChecksumError(const std::string& what)
      : Error(errc::checksum, what) {}
};

struct NoFixError : Error {
  explicit NoFixError(const std::string& what) : Error(errc::no_fix, what) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& what) : Error(errc::schema, what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what)
      : Error(errc::validation, what) {}
};

struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& what)
      : Error(errc::empty_input, what) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& what)
      : Error(errc::shape_mismatch, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(errc::io, what) {}
};

struct NetworkError : Error {
  explicit NetworkError(const std::string& what)
      : Error(errc::network, what) {}
};

}  // namespace tracekit
