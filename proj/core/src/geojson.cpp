#include "spotspray/geojson.hpp"

#include <cmath>

#include "json.hpp"
#include "spotspray/errors.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/units.hpp"

namespace spotspray {

namespace {

constexpr double kEarthRadiusM = 6378137.0;  // WGS84 equatorial
constexpr double kPi = 3.141592653589793238462643383279502884;

struct Projector {
  double lat0_rad;
  double lon0_deg;
  double lat0_deg;
  double east_scale;  // metres per degree of longitude at the origin
  double sin_h;
  double cos_h;

  explicit Projector(const GeoOrigin& origin) {
    origin.validate();
    lat0_deg = origin.origin_lat;
    lon0_deg = origin.origin_lon;
    lat0_rad = origin.origin_lat * kPi / 180.0;
    const double cos_lat0 = std::cos(lat0_rad);
    if (std::abs(cos_lat0) < 1e-6) {
      throw GeometryError("geo origin too close to a pole for a planar spray map");
    }
    east_scale = kEarthRadiusM * cos_lat0 * kPi / 180.0;
    const double heading_rad = origin.heading_deg * kPi / 180.0;
    sin_h = std::sin(heading_rad);
    cos_h = std::cos(heading_rad);
  }

  // along = along-track metres (direction of travel), cross = metres to the
  // right of travel; returns {lon, lat} in degrees.
  std::pair<double, double> to_lonlat(double along_m, double cross_m) const {
    const double east = along_m * sin_h + cross_m * cos_h;
    const double north = along_m * cos_h - cross_m * sin_h;
    const double lat = lat0_deg + north / kEarthRadiusM * 180.0 / kPi;
    const double lon = lon0_deg + east / east_scale;
    return {lon, lat};
  }
};

int tile_of_nozzle(const TileGrid& grid, int local_nozzle) {
  for (std::size_t t = 0; t < grid.nozzle_of_tile.size(); ++t) {
    if (grid.nozzle_of_tile[t] == local_nozzle) return static_cast<int>(t);
  }
  throw GeometryError("nozzle " + std::to_string(local_nozzle) + " is not wired to any tile");
}

}  // namespace

double nozzle_cross_centre_m(const StripGeometry& strip, const TileGrid& grid, int nozzle_id) {
  grid.validate();
  strip.validate();
  const int tiles = grid.tile_count();
  if (nozzle_id < 0 || nozzle_id >= strip.rows * tiles) {
    throw GeometryError("nozzle id " + std::to_string(nozzle_id) + " outside strip (" +
                        std::to_string(strip.rows * tiles) + " nozzles)");
  }
  const int lane = nozzle_id / tiles;
  const int tile = tile_of_nozzle(grid, nozzle_id % tiles);
  const auto& extent = grid.inference_tiles[static_cast<std::size_t>(tile)];
  const double tile_centre = (extent.first + extent.second) / 2.0;
  return strip.lane_centre_cross_m(lane) + tile_centre;
}

std::string emit_spray_map(const std::vector<PassLog>& logs, const TileGrid& grid,
                           const GeoOrigin& origin) {
  using json = nlohmann::ordered_json;
  const Projector projector(origin);
  grid.validate();

  json features = json::array();
  for (std::size_t strip_index = 0; strip_index < logs.size(); ++strip_index) {
    const PassLog& log = logs[strip_index];
    for (const SprayEvent& event : log.spray_events) {
      const double along_start = event.start_position_m;
      const double along_end = spray_interval_end_m(event, log.speed_kmh);
      const double cross = nozzle_cross_centre_m(log.strip, grid, event.nozzle_id);
      const auto [lon0, lat0] = projector.to_lonlat(along_start, cross);
      const auto [lon1, lat1] = projector.to_lonlat(along_end, cross);

      json feature;
      feature["type"] = "Feature";
      json props;
      props["strip"] = strip_index;
      props["treatment"] = std::string(to_string(log.treatment));
      props["nozzle"] = event.nozzle_id;
      props["start_ms"] = event.start_ms;
      props["duration_ms"] = event.duration_ms;
      props["volume_l"] = event.volume_l;
      feature["properties"] = props;
      json geometry;
      geometry["type"] = "LineString";
      geometry["coordinates"] = json::array({json::array({lon0, lat0}), json::array({lon1, lat1})});
      feature["geometry"] = geometry;
      features.push_back(feature);
    }
  }

  json root;
  root["type"] = "FeatureCollection";
  root["features"] = features;
  return root.dump(2) + "\n";
}

}  // namespace spotspray
