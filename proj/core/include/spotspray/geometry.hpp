#pragma once

#include <utility>
#include <vector>

#include "spotspray/errors.hpp"

namespace spotspray {

// Downward-looking camera mounted on the spray boom. The along-track
// footprint is the slice of ground one frame captures in the direction of
// travel; the cross-track footprint follows from mount height and lens angle.
struct CameraConfig {
  double mount_height_m = 1.0;
  double lens_angle_deg = 77.32;
  double along_footprint_m = 0.8;
  double frame_period_ms = 21.9;

  void validate() const;
  double cross_footprint_m() const;
};

// Cross-track row of inference tiles centred on the camera axis, each tile
// wired to exactly one nozzle. The layout is one row of two equal tiles.
struct TileGrid {
  // Cross-track (min, max) extents relative to the camera centreline.
  std::vector<std::pair<double, double>> inference_tiles;
  // Bijective tile index -> nozzle index within one camera.
  std::vector<int> nozzle_of_tile;

  // Two equal tiles splitting `span_m` symmetrically about the centreline,
  // identity nozzle wiring.
  static TileGrid centered(double span_m);

  void validate() const;
  int tile_count() const { return static_cast<int>(inference_tiles.size()); }
  double span_m() const;
  double tile_width_m(int tile) const;
  // Tile containing the offset, or -1 when it falls outside the span.
  int tile_containing(double cross_rel_m) const;
  // Like tile_containing but clamps out-of-span offsets to the edge tiles.
  int nearest_tile(double cross_rel_m) const;
};

// Vehicle kinematics during one pass. Speed is stored in m/s; configs accept
// km/h and convert on ingest. along_m is monotonically non-decreasing within
// a pass (maintained by the control loop, not checked here).
struct VehicleState {
  double along_m = 0.0;
  double speed_mps = 0.0;
  int row_index = 0;

  void validate() const;
};

// One strip is subdivided into parallel crop rows of fixed width; row k of a
// strip spans cross-track [offset + k*w, offset + (k+1)*w).
struct RowLayout {
  double row_width_m = 1.6;
  int rows_per_strip = 13;
  double strip_length_m = 601.0;

  void validate() const;
  double strip_width_m() const { return row_width_m * rows_per_strip; }
  double strip_area_ha() const;
};

struct GroundRect {
  double along_min_m = 0.0;
  double along_max_m = 0.0;
  double cross_min_m = 0.0;
  double cross_max_m = 0.0;
};

// Ground width seen by a lens of the given full angle at the given height:
// 2 * h * tan(angle / 2). Throws GeometryError for h <= 0, negative angle or
// angle >= 180 degrees; angle 0 sees a line (width 0).
double fov_width(double mount_height_m, double lens_angle_deg);

// Ground distance covered in `interval_ms` at `speed_kmh`, in millimetres.
// Throws GeometryError for negative inputs.
double displacement_during(double speed_kmh, double interval_ms);

// Length of ground sprayed by a nozzle held open for `duration_s` while the
// vehicle moves at `speed_kmh`, in metres.
double spray_section_length(double speed_kmh, double duration_s);

// Ground rectangle covered by each inference tile for a camera at the given
// vehicle state: along-track extent is the camera footprint centred on the
// vehicle, cross-track extents come from the grid (relative to the camera
// centreline). Throws GeometryError when the tiles are wider than the
// camera's field of view.
std::vector<GroundRect> tile_ground_footprint(const CameraConfig& camera, const TileGrid& grid,
                                              const VehicleState& vehicle);

}  // namespace spotspray
