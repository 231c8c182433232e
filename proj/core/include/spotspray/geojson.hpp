#pragma once

#include <string>
#include <vector>

#include "spotspray/config.hpp"
#include "spotspray/controller.hpp"
#include "spotspray/geometry.hpp"

namespace spotspray {

// Renders the spray events of one or more passes as a GeoJSON
// FeatureCollection: one LineString per spray event, properties {strip,
// treatment, nozzle, start_ms, duration_ms, volume_l}. Blanket strips come
// out as full-length lines, spot strips as gapped segments.
//
// Ground coordinates are mapped through a local equirectangular tangent
// plane at `origin` (adequate at paddock scale): along-track follows
// `origin.heading_deg` (clockwise from north), cross-track points to the
// right of travel. Inverting with the same projection recovers segment
// lengths to well under a millimetre.
std::string emit_spray_map(const std::vector<PassLog>& logs, const TileGrid& grid,
                           const GeoOrigin& origin);

// Cross-track centreline of a global nozzle id in trial coordinates (strip
// offset + lane centre + tile centre).
double nozzle_cross_centre_m(const StripGeometry& strip, const TileGrid& grid, int nozzle_id);

}  // namespace spotspray
