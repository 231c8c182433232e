#pragma once

#include <stdexcept>
#include <string>

namespace spotspray {

// Base class for all library errors. Subclasses map onto CLI exit codes:
// ConfigError -> 2, IoError -> 3, SchemaError -> 4, everything else -> 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid numeric argument to a geometry/physics routine.
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// Parameter outside its documented domain (rates, probabilities, counts).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Statistical routine called on degenerate input (n too small, zero variance
// where the estimator divides by it, ...).
class StatsError : public Error {
 public:
  explicit StatsError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent run configuration (missing key, bad value, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Structurally invalid data file: wrong header, wrong column count, cell that
// fails to parse. Message names the offending row and column.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

// Filesystem problem: unreadable input, unwritable output directory.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Temporal-ordering violation in the actuation protocol (e.g. detections fed
// to a nozzle out of order).
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

}  // namespace spotspray
