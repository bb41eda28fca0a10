#include "tcstruct/regrid.hpp"

#include "tcstruct/error.hpp"

#include <cmath>

namespace tcs {

namespace {

// Wraps lon into (ref - 180, ref + 180].
double normalize_lon(double lon, double ref) {
    double d = lon - ref;
    d -= 360.0 * std::floor((d + 180.0) / 360.0);
    if (d <= -180.0) d += 360.0;
    return ref + d;
}

} // namespace

CenteredImage regrid_to_storm(const IrFrame& frame, LatLon center, const GridGeom& geom) {
    if (std::abs(center.lat) >= 85.0)
        throw DataError("cannot regrid at |lat| >= 85 degrees (center lat " +
                        std::to_string(center.lat) + ")");
    CenteredImage out = make_centered_image(geom, center.lat, center.lon, frame.valid_time);

    const double cos_lat = std::cos(center.lat * M_PI / 180.0);
    const double origin_lon = normalize_lon(frame.origin_lon, center.lon);

    for (int i = 0; i < out.side; ++i) {
        const double src_lat = center.lat + out.y_km(i) / kKmPerDegree;
        const double frow = (frame.origin_lat - src_lat) / frame.step_deg;
        for (int j = 0; j < out.side; ++j) {
            const double src_lon =
                normalize_lon(center.lon + out.x_km(j) / (kKmPerDegree * cos_lat), center.lon);
            const double fcol = (src_lon - origin_lon) / frame.step_deg;
            if (frow < 0.0 || frow > frame.height - 1 || fcol < 0.0 || fcol > frame.width - 1)
                continue; // outside the frame -> stays missing

            int r0 = static_cast<int>(frow);
            int c0 = static_cast<int>(fcol);
            if (r0 > frame.height - 2) r0 = frame.height - 2;
            if (c0 > frame.width - 2) c0 = frame.width - 2;
            const double wr = frow - r0;
            const double wc = fcol - c0;

            const float v00 = frame.at(r0, c0);
            const float v01 = frame.at(r0, c0 + 1);
            const float v10 = frame.at(r0 + 1, c0);
            const float v11 = frame.at(r0 + 1, c0 + 1);
            const double w00 = (1.0 - wr) * (1.0 - wc);
            const double w01 = (1.0 - wr) * wc;
            const double w10 = wr * (1.0 - wc);
            const double w11 = wr * wc;

            double num = 0.0, den = 0.0;
            if (!is_missing(v00)) { num += w00 * v00; den += w00; }
            if (!is_missing(v01)) { num += w01 * v01; den += w01; }
            if (!is_missing(v10)) { num += w10 * v10; den += w10; }
            if (!is_missing(v11)) { num += w11 * v11; den += w11; }
            if (den > 0.0) out.at(i, j) = static_cast<float>(num / den);
        }
    }
    return out;
}

} // namespace tcs
