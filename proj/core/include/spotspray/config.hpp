#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "spotspray/controller.hpp"
#include "spotspray/detector.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/geometry.hpp"

namespace spotspray {

// Geodetic anchor of the trial: WGS84 position of the origin (strip start,
// cross-track 0) and the compass bearing of the direction of travel.
struct GeoOrigin {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double heading_deg = 0.0;

  void validate() const;
};

// Everything one run needs, parsed from a single sectioned key=value file.
// One file + one seed fully determine a run.
struct RunConfig {
  std::uint64_t seed = 0;
  FieldSpec field;
  int n_strips = 4;
  Treatment first_treatment = Treatment::blanket;
  RowLayout rows;
  CameraConfig camera;
  TileGrid grid = TileGrid::centered(1.6);
  DetectorProfile detector;
  LatencyProfile latency;
  double speed_kmh = 8.0;
  // 0 = derive from section_length_m at the configured speed.
  double spray_duration_ms = 0.0;
  double section_length_m = 1.0;
  // 0 = calibrate so a continuously-on nozzle lays down application_rate_l_ha.
  double flow_rate_lps = 0.0;
  double application_rate_l_ha = 200.0;
  std::optional<GeoOrigin> geo;
  std::optional<double> runoff_fraction;       // surrogate runoff model inputs
  std::optional<double> runoff_volume_l_ha;
  std::string out_dir = "out";
  std::uint64_t config_hash = 0;  // FNV-1a 64 over the raw config bytes

  double effective_spray_duration_ms() const;
  double effective_flow_rate_lps() const;
  void validate() const;
};

// Parses and validates a run config file. Syntax: `[section]` headers,
// `key = value` pairs, `#` comments, blank lines. Unknown sections or keys
// and malformed values raise ConfigError naming the file and line.
RunConfig load_run_config(const std::string& path);

// FNV-1a 64-bit over a byte string (provenance hashing).
std::uint64_t fnv1a64(const std::string& bytes);

// Lowercase hex of a 64-bit hash, fixed width 16.
std::string hash_hex(std::uint64_t hash);

}  // namespace spotspray
