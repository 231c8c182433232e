#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spotspray/detector.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/geometry.hpp"
#include "spotspray/rng.hpp"

namespace spotspray {

struct LatencyStage {
  double mean_ms = 0.0;
  double sd_ms = 0.0;
};

// Four-stage delay between a frame hitting the sensor and the solenoid
// opening. Defaults are the measured workflow timings.
struct LatencyProfile {
  LatencyStage acquisition{5.85, 0.75};
  LatencyStage preprocessing{8.88, 0.05};
  LatencyStage inference{21.90, 5.53};
  LatencyStage solenoid{21.53, 1.70};

  void validate() const;
  double mean_total_ms() const;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

// One nozzle activation burst; retriggers while the nozzle is on extend the
// same event. volume_l always equals flow_rate * duration.
struct SprayEvent {
  int nozzle_id = 0;
  double start_position_m = 0.0;  // along-track ground position where spray lands
  double start_ms = 0.0;          // solenoid-open time
  double duration_ms = 0.0;
  double volume_l = 0.0;
  std::optional<GeoPoint> geo;
};

struct NozzleState {
  enum class Mode { off, commanded, on };

  int nozzle_id = 0;
  Mode mode = Mode::off;
  double on_since_ms = 0.0;
  double scheduled_off_ms = 0.0;
  double flow_rate_lps = 0.0;
  double last_command_ms = -1.0e300;
  std::int64_t open_event = -1;  // index into the pass event list while active

  void validate() const;
};

// Frame of reference of one treatment strip: cross-track offset of its left
// edge in trial coordinates plus its row geometry.
struct StripGeometry {
  double cross_offset_m = 0.0;
  int rows = 13;
  double row_width_m = 1.6;
  double length_m = 601.0;

  void validate() const;
  double width_m() const { return rows * row_width_m; }
  double area_ha() const;
  bool contains_cross(double cross_m) const;
  int lane_of(double cross_m) const;  // clamped to [0, rows)
  double lane_centre_cross_m(int lane) const;
};

// Everything one simulated pass produced. Spray events are sorted by
// (start_ms, nozzle_id).
struct PassLog {
  std::vector<DetectionRecord> detections;
  std::vector<SprayEvent> spray_events;
  double distance_m = 0.0;
  Treatment treatment = Treatment::spot;
  double speed_kmh = 0.0;
  StripGeometry strip;
  std::int64_t images_total = 0;
  std::int64_t images_with_detection = 0;
};

// One end-to-end pipeline delay: the sum of four independent normal stage
// draws, each truncated at zero. With all sds zero this is exactly the sum
// of the stage means.
double sample_total_latency(const LatencyProfile& profile, RngStream& rng);

// Applies one detection to a nozzle. The solenoid opens at detection time +
// latency and closes spray_duration_ms later; a retrigger that lands while
// the nozzle is still scheduled on extends the open event's off-time instead
// of opening a new one. On a rising edge the new event is appended to
// `events`. Detections must reach a nozzle in non-decreasing time order
// (ProtocolError otherwise).
void schedule_spray(double detection_time_ms, double detection_position_m,
                    const VehicleState& vehicle, double latency_ms, double spray_duration_ms,
                    NozzleState& nozzle, std::vector<SprayEvent>& events);

// Ground interval wetted by one event at the pass speed: [start_position,
// start_position + speed * duration].
double spray_interval_end_m(const SprayEvent& event, double speed_kmh);

// Simulates one treatment pass over one strip. Spot passes run the full
// detect -> schedule loop per frame per tile; blanket passes hold every
// nozzle on over the whole strip. The detector runs (and detections are
// logged) under both treatments, so weed-density metrics exist for blanket
// strips too. Deterministic for a fixed seed.
PassLog simulate_pass(const std::vector<WeedInstance>& field, const StripGeometry& strip,
                      Treatment treatment, const CameraConfig& camera, const TileGrid& grid,
                      const DetectorProfile& detector, const LatencyProfile& latency,
                      double speed_kmh, double spray_duration_ms, double flow_rate_lps,
                      std::uint64_t seed);

// Herbicide applied per hectare: total event volume / area.
double usage_l_per_ha(const PassLog& log, double area_ha);

struct CoverageResult {
  std::vector<std::int64_t> sprayed;
  std::vector<std::int64_t> missed;
};

// Splits the strip's weeds into sprayed and missed. A weed is sprayed iff
// some event of its tile's nozzle covers the weed's along-track position;
// cross-track coverage is implied by the tile-to-nozzle assignment. Weeds
// outside the log's strip are ignored; sprayed and missed partition the
// strip's weeds and are each sorted by id.
CoverageResult coverage_hits(const std::vector<WeedInstance>& field, const PassLog& log,
                             const TileGrid& grid);

}  // namespace spotspray
