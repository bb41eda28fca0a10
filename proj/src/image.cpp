#include "tcstruct/image.hpp"

#include "tcstruct/error.hpp"

#include <algorithm>

namespace tcs {

std::size_t CenteredImage::missing_count() const {
    return static_cast<std::size_t>(
        std::count_if(temps.begin(), temps.end(), [](float v) { return is_missing(v); }));
}

CenteredImage make_centered_image(const GridGeom& geom, double center_lat, double center_lon,
                                  UtcTime valid_time) {
    if (geom.step_km <= 0) throw DataError("grid step must be positive");
    const double ratio = geom.half_width_km / geom.step_km;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9)
        throw DataError("half_width_km must be an integral multiple of step_km");
    CenteredImage img;
    img.center_lat = center_lat;
    img.center_lon = center_lon;
    img.half_width_km = geom.half_width_km;
    img.step_km = geom.step_km;
    img.valid_time = valid_time;
    img.side = geom.side();
    img.temps.assign(static_cast<std::size_t>(img.side) * img.side, kMissing);
    return img;
}

void validate_frame(const IrFrame& frame, const std::string& name) {
    if (frame.width < 16 || frame.height < 16)
        throw DataError("frame " + name + ": width/height must be >= 16");
    if (frame.step_deg <= 0) throw DataError("frame " + name + ": step_deg must be positive");
    if (frame.temps.size() != static_cast<std::size_t>(frame.width) * frame.height)
        throw DataError("frame " + name + ": pixel count does not match dimensions");
    for (float v : frame.temps) {
        if (!is_missing(v) && (v < kMinTempK || v > kMaxTempK))
            throw DataError("frame " + name + ": temperature outside [150, 340] K");
    }
}

} // namespace tcs
