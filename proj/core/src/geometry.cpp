#include "spotspray/geometry.hpp"

#include <cmath>

#include "spotspray/units.hpp"

namespace spotspray {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void CameraConfig::validate() const {
  if (!(mount_height_m > 0.0)) throw GeometryError("camera: mount_height_m must be > 0");
  if (!(lens_angle_deg > 0.0 && lens_angle_deg < 180.0))
    throw GeometryError("camera: lens_angle_deg must be in (0, 180)");
  if (!(along_footprint_m > 0.0)) throw GeometryError("camera: along_footprint_m must be > 0");
  if (!(frame_period_ms > 0.0)) throw GeometryError("camera: frame_period_ms must be > 0");
}

double CameraConfig::cross_footprint_m() const { return fov_width(mount_height_m, lens_angle_deg); }

TileGrid TileGrid::centered(double span_m) {
  if (!(span_m > 0.0)) throw GeometryError("tile grid: span_m must be > 0");
  TileGrid grid;
  grid.inference_tiles = {{-span_m / 2.0, 0.0}, {0.0, span_m / 2.0}};
  grid.nozzle_of_tile = {0, 1};
  return grid;
}

void TileGrid::validate() const {
  if (inference_tiles.size() != 2)
    throw GeometryError("tile grid: layout is one row of exactly 2 inference tiles");
  if (nozzle_of_tile.size() != inference_tiles.size())
    throw GeometryError("tile grid: nozzle_of_tile must map every tile");
  const double width0 = inference_tiles[0].second - inference_tiles[0].first;
  for (std::size_t i = 0; i < inference_tiles.size(); ++i) {
    const auto& [lo, hi] = inference_tiles[i];
    if (!(hi > lo)) throw GeometryError("tile grid: tile extents must have positive width");
    if (std::fabs((hi - lo) - width0) > 1e-9)
      throw GeometryError("tile grid: tiles must have equal width");
    if (i > 0 && std::fabs(lo - inference_tiles[i - 1].second) > 1e-9)
      throw GeometryError("tile grid: tiles must be contiguous and non-overlapping");
  }
  std::vector<bool> seen(nozzle_of_tile.size(), false);
  for (int nozzle : nozzle_of_tile) {
    if (nozzle < 0 || nozzle >= static_cast<int>(nozzle_of_tile.size()) || seen[nozzle])
      throw GeometryError("tile grid: nozzle_of_tile must be a bijection");
    seen[nozzle] = true;
  }
}

double TileGrid::span_m() const {
  if (inference_tiles.empty()) return 0.0;
  return inference_tiles.back().second - inference_tiles.front().first;
}

double TileGrid::tile_width_m(int tile) const {
  if (tile < 0 || tile >= tile_count()) throw GeometryError("tile grid: tile index out of range");
  return inference_tiles[tile].second - inference_tiles[tile].first;
}

int TileGrid::tile_containing(double cross_rel_m) const {
  for (int i = 0; i < tile_count(); ++i) {
    const auto& [lo, hi] = inference_tiles[i];
    // Half-open cells except the last, which owns its upper edge.
    if (cross_rel_m >= lo && (cross_rel_m < hi || (i == tile_count() - 1 && cross_rel_m == hi)))
      return i;
  }
  return -1;
}

int TileGrid::nearest_tile(double cross_rel_m) const {
  const int tile = tile_containing(cross_rel_m);
  if (tile >= 0) return tile;
  return cross_rel_m < inference_tiles.front().first ? 0 : tile_count() - 1;
}

void VehicleState::validate() const {
  if (!(speed_mps >= 0.0)) throw GeometryError("vehicle: speed must be >= 0");
  if (!std::isfinite(along_m)) throw GeometryError("vehicle: position must be finite");
  if (row_index < 0) throw GeometryError("vehicle: row_index must be >= 0");
}

void RowLayout::validate() const {
  if (!(row_width_m > 0.0)) throw GeometryError("rows: row_width_m must be > 0");
  if (rows_per_strip < 1) throw GeometryError("rows: rows_per_strip must be >= 1");
  if (!(strip_length_m > 0.0)) throw GeometryError("rows: strip_length_m must be > 0");
}

double RowLayout::strip_area_ha() const { return m2_to_ha(strip_width_m() * strip_length_m); }

double fov_width(double mount_height_m, double lens_angle_deg) {
  if (!(mount_height_m > 0.0)) throw GeometryError("fov_width: mount_height_m must be > 0");
  if (!(lens_angle_deg >= 0.0 && lens_angle_deg < 180.0))
    throw GeometryError("fov_width: lens_angle_deg must be in [0, 180)");
  return 2.0 * mount_height_m * std::tan(lens_angle_deg * kPi / 180.0 / 2.0);
}

double displacement_during(double speed_kmh, double interval_ms) {
  if (!(speed_kmh >= 0.0)) throw GeometryError("displacement_during: speed_kmh must be >= 0");
  if (!(interval_ms >= 0.0)) throw GeometryError("displacement_during: interval_ms must be >= 0");
  // km/h * (1000/3600) = m/s = mm/ms.
  return kmh_to_mps(speed_kmh) * interval_ms;
}

double spray_section_length(double speed_kmh, double duration_s) {
  if (!(speed_kmh >= 0.0)) throw GeometryError("spray_section_length: speed_kmh must be >= 0");
  if (!(duration_s >= 0.0)) throw GeometryError("spray_section_length: duration_s must be >= 0");
  return kmh_to_mps(speed_kmh) * duration_s;
}

std::vector<GroundRect> tile_ground_footprint(const CameraConfig& camera, const TileGrid& grid,
                                              const VehicleState& vehicle) {
  camera.validate();
  grid.validate();
  vehicle.validate();
  if (grid.span_m() > camera.cross_footprint_m() + 1e-9)
    throw GeometryError("tile grid: tiles extend beyond the camera field of view");
  const double half_along = camera.along_footprint_m / 2.0;
  std::vector<GroundRect> rects;
  rects.reserve(grid.inference_tiles.size());
  for (const auto& [lo, hi] : grid.inference_tiles) {
    rects.push_back(
        GroundRect{vehicle.along_m - half_along, vehicle.along_m + half_along, lo, hi});
  }
  return rects;
}

}  // namespace spotspray
