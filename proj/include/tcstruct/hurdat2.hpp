#pragma once

#include "tcstruct/time.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tcs {

// One best-track row. vmax is knots, pmin millibars; the HURDAT2 sentinels
// -99/-999 map to missing.
struct TrackFix {
    UtcTime time;
    char record_id = ' '; // 'L' = landfall etc.; ' ' when blank
    std::string status;   // TD, TS, HU, EX, SD, SS, LO, WV, DB
    double lat = 0.0;     // degrees, north positive
    double lon = 0.0;     // degrees, east positive
    std::optional<double> vmax;
    std::optional<double> pmin;
};

struct StormTrack {
    std::string storm_id; // basin(2) + number(2) + year(4), e.g. AL092011
    std::string name;
    std::vector<TrackFix> fixes; // times strictly increasing
};

struct Hurdat2Reject {
    std::string storm_id;
    int line = 0; // 1-based line number of the offending line
    std::string reason;
};

// Accepted tracks in input order plus per-track rejection diagnostics.
// A malformed track never aborts the stream.
struct Hurdat2Result {
    std::vector<StormTrack> tracks;
    std::vector<Hurdat2Reject> rejected;
};

Hurdat2Result parse_hurdat2(std::istream& in);
Hurdat2Result parse_hurdat2_text(const std::string& text);
Hurdat2Result parse_hurdat2_file(const std::string& path);

// Writes tracks back in the documented field layout; parsing the output
// reproduces the tracks field-for-field.
std::string format_hurdat2(const std::vector<StormTrack>& tracks);

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

// Piecewise-linear position in time. Exact at fix times; throws DataError
// outside the track span (or for a <2-fix track unless t hits the lone fix).
LatLon interpolate_center(const StormTrack& track, UtcTime t);

} // namespace tcs
