#include "tcstruct/hurdat2.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tcs {

namespace {

bool is_storm_id(std::string_view s) {
    if (s.size() != 8) return false;
    return std::isupper(static_cast<unsigned char>(s[0])) &&
           std::isupper(static_cast<unsigned char>(s[1])) &&
           std::all_of(s.begin() + 2, s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool looks_like_header(const std::vector<std::string>& fields) {
    return fields.size() >= 3 && is_storm_id(fields[0]);
}

bool looks_like_data(const std::vector<std::string>& fields) {
    return !fields.empty() && fields[0].size() == 8 &&
           std::all_of(fields[0].begin(), fields[0].end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

double parse_hemisphere(const std::string& field, char pos, char neg, double limit,
                        const char* what) {
    if (field.size() < 2) throw ParseError(std::string("short ") + what + " field '" + field + "'");
    const char suffix = field.back();
    double v = parse_double(std::string_view(field).substr(0, field.size() - 1), what);
    if (suffix == neg)
        v = -v;
    else if (suffix != pos)
        throw ParseError(std::string("bad hemisphere suffix in ") + what + " '" + field + "'");
    if (v < -limit || v > limit)
        throw ParseError(std::string(what) + " out of range: '" + field + "'");
    return v;
}

std::optional<double> parse_sentinel_value(const std::string& field, double lo, double hi,
                                           const char* what) {
    const double v = parse_double(field, what);
    if (v == -99.0 || v == -999.0) return std::nullopt;
    if (v < lo || v > hi)
        throw ParseError(std::string(what) + " out of range: '" + field + "'");
    return v;
}

TrackFix parse_data_row(const std::vector<std::string>& fields) {
    if (fields.size() < 8) throw ParseError("data row has fewer than 8 fields");
    TrackFix fix;
    fix.time = parse_hurdat2_time(fields[0], fields[1]);
    fix.record_id = fields[2].empty() ? ' ' : fields[2][0];
    fix.status = fields[3];
    fix.lat = parse_hemisphere(fields[4], 'N', 'S', 90.0, "latitude");
    fix.lon = parse_hemisphere(fields[5], 'E', 'W', 180.0, "longitude");
    fix.vmax = parse_sentinel_value(fields[6], 0.0, 250.0, "vmax");
    fix.pmin = parse_sentinel_value(fields[7], 800.0, 1100.0, "pmin");
    return fix;
}

} // namespace

Hurdat2Result parse_hurdat2(std::istream& in) {
    Hurdat2Result result;
    std::string line;
    int line_no = 0;

    std::string cur_id, cur_name;
    long declared = 0;
    long consumed = 0;
    bool in_track = false;
    bool track_bad = false;
    StormTrack track;

    auto finish_track = [&]() {
        if (!in_track) return;
        if (!track_bad && consumed != declared) {
            result.rejected.push_back({cur_id, line_no,
                                       "declared " + std::to_string(declared) + " rows but found " +
                                           std::to_string(consumed)});
            track_bad = true;
        }
        if (!track_bad) result.tracks.push_back(std::move(track));
        in_track = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);

        if (looks_like_header(fields)) {
            finish_track();
            track = StormTrack{};
            cur_id = fields[0];
            cur_name = fields[1];
            in_track = true;
            track_bad = false;
            consumed = 0;
            try {
                declared = parse_long(fields[2], "header row count");
            } catch (const ParseError& e) {
                result.rejected.push_back({cur_id, line_no, e.what()});
                track_bad = true;
                declared = -1;
            }
            track.storm_id = cur_id;
            track.name = cur_name;
            continue;
        }

        if (!in_track) {
            result.rejected.push_back({"", line_no, "data row before any header"});
            continue;
        }

        ++consumed;
        if (track_bad) continue; // keep consuming so the stream stays aligned
        try {
            if (!looks_like_data(fields)) throw ParseError("unrecognized row");
            TrackFix fix = parse_data_row(fields);
            if (!track.fixes.empty() && !(track.fixes.back().time < fix.time))
                throw ParseError("fix times not strictly increasing");
            track.fixes.push_back(std::move(fix));
        } catch (const ParseError& e) {
            result.rejected.push_back({cur_id, line_no, e.what()});
            track_bad = true;
        }
    }
    finish_track();
    return result;
}

Hurdat2Result parse_hurdat2_text(const std::string& text) {
    std::istringstream in(text);
    return parse_hurdat2(in);
}

Hurdat2Result parse_hurdat2_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open HURDAT2 file " + path);
    return parse_hurdat2(in);
}

std::string format_hurdat2(const std::vector<StormTrack>& tracks) {
    std::ostringstream out;
    char buf[160];
    for (const StormTrack& track : tracks) {
        std::snprintf(buf, sizeof buf, "%s,%19s,%7zu,\n", track.storm_id.c_str(),
                      track.name.c_str(), track.fixes.size());
        out << buf;
        for (const TrackFix& fix : track.fixes) {
            const CivilTime c = to_civil(fix.time);
            char latbuf[16], lonbuf[16];
            std::snprintf(latbuf, sizeof latbuf, "%.1f%c", std::abs(fix.lat),
                          fix.lat < 0 ? 'S' : 'N');
            std::snprintf(lonbuf, sizeof lonbuf, "%.1f%c", std::abs(fix.lon),
                          fix.lon < 0 ? 'W' : 'E');
            std::snprintf(buf, sizeof buf, "%04d%02d%02d, %02d%02d, %c, %2s, %6s, %7s, %3ld, %4ld,\n",
                          c.year, c.month, c.day, c.hour, c.minute, fix.record_id,
                          fix.status.c_str(), latbuf, lonbuf,
                          fix.vmax ? std::lround(*fix.vmax) : -99L,
                          fix.pmin ? std::lround(*fix.pmin) : -999L);
            out << buf;
        }
    }
    return out.str();
}

LatLon interpolate_center(const StormTrack& track, UtcTime t) {
    const auto& fixes = track.fixes;
    if (fixes.empty()) throw DataError("track " + track.storm_id + " has no fixes");
    if (fixes.size() == 1) {
        if (t == fixes[0].time) return {fixes[0].lat, fixes[0].lon};
        throw DataError("track " + track.storm_id + " has a single fix; cannot interpolate");
    }
    if (t < fixes.front().time || t > fixes.back().time)
        throw DataError("time " + format_iso8601(t) + " outside track span of " + track.storm_id);

    const auto it = std::lower_bound(fixes.begin(), fixes.end(), t,
                                     [](const TrackFix& f, UtcTime tt) { return f.time < tt; });
    if (it->time == t) return {it->lat, it->lon};
    const TrackFix& hi = *it;
    const TrackFix& lo = *(it - 1);
    const double frac = static_cast<double>(t - lo.time) / static_cast<double>(hi.time - lo.time);
    return {lo.lat + frac * (hi.lat - lo.lat), lo.lon + frac * (hi.lon - lo.lon)};
}

} // namespace tcs
