#pragma once

#include "tcstruct/time.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace tcs {

inline constexpr float kMinTempK = 150.0f;
inline constexpr float kMaxTempK = 340.0f;
inline constexpr double kKmPerDegree = 111.32;

inline bool is_missing(float v) { return std::isnan(v); }
inline constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

// Storm-centered brightness-temperature grid on a fixed local km grid.
// Square with odd side; row 0 is the northernmost row, column 0 the
// westernmost. Temperatures are Kelvin, stored as binary32; missing
// pixels are quiet NaN.
struct CenteredImage {
    double center_lat = 0.0;
    double center_lon = 0.0;
    double half_width_km = 0.0;
    double step_km = 0.0;
    UtcTime valid_time;
    int side = 0;
    std::vector<float> temps; // side*side, row-major

    int half_n() const { return (side - 1) / 2; }
    float at(int row, int col) const { return temps[static_cast<std::size_t>(row) * side + col]; }
    float& at(int row, int col) { return temps[static_cast<std::size_t>(row) * side + col]; }
    // Local east/north displacement of a pixel center from the storm center.
    double x_km(int col) const { return (col - half_n()) * step_km; }
    double y_km(int row) const { return (half_n() - row) * step_km; }

    std::size_t missing_count() const;
};

// Geometry of the centered analysis grid. half_width must be an integral
// multiple of step (odd-side invariant).
struct GridGeom {
    double half_width_km = 400.0;
    double step_km = 4.0;

    int side() const { return 2 * static_cast<int>(std::llround(half_width_km / step_km)) + 1; }
};

// Makes an all-missing image with the given geometry/metadata.
CenteredImage make_centered_image(const GridGeom& geom, double center_lat, double center_lon,
                                  UtcTime valid_time);

// One satellite IR frame on a regular lat/lon grid. Pixel (0,0) center is
// (origin_lat, origin_lon); longitude grows with column index by step_deg
// and latitude falls with row index by step_deg (row 0 northernmost).
struct IrFrame {
    UtcTime valid_time;
    std::string channel = "IR ~10.7um";
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double step_deg = 0.0;
    int width = 0;
    int height = 0;
    std::vector<float> temps; // height*width, row-major

    float at(int row, int col) const { return temps[static_cast<std::size_t>(row) * width + col]; }
    float& at(int row, int col) { return temps[static_cast<std::size_t>(row) * width + col]; }
    double lat_of_row(int row) const { return origin_lat - row * step_deg; }
    double lon_of_col(int col) const { return origin_lon + col * step_deg; }
};

// Range/shape checks for the invariants documented above; throws DataError.
void validate_frame(const IrFrame& frame, const std::string& name);

} // namespace tcs
