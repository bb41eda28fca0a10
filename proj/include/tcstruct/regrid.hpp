#pragma once

#include "tcstruct/hurdat2.hpp"
#include "tcstruct/image.hpp"

namespace tcs {

// Resamples a lat/lon frame onto a storm-centered km grid. Target point
// (x_km east, y_km north) of the center maps to
//   lon = center_lon + x_km / (111.32 * cos(center_lat))
//   lat = center_lat + y_km / 111.32
// and is filled by missing-aware bilinear interpolation; points that fall
// outside the frame or whose four neighbors are all missing come back
// missing. Longitudes are compared after normalization into
// (center_lon - 180, center_lon + 180], so frames straddling the
// antimeridian resolve correctly.
//
// Throws DataError for |center_lat| >= 85 (flat-earth mapping breaks down),
// non-positive step, or half_width not a multiple of step.
CenteredImage regrid_to_storm(const IrFrame& frame, LatLon center, const GridGeom& geom);

} // namespace tcs
