#include "tcstruct/error.hpp"
#include "tcstruct/hurdat2.hpp"
#include "tcstruct/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace tcs;

namespace {

const char* kIrene =
    "AL092011,             IRENE,      3,\n"
    "20110821, 0000,  , TS, 15.0N,  59.0W,  45, 1011,\n"
    "20110821, 0600,  , TS, 16.0N,  60.0W,  50, 1009,\n"
    "20110821, 1200, L, TS, 17.0N,  61.0W, -99, 1006,\n";

StormTrack random_track(std::uint64_t seed, int year) {
    RngStream rng(seed);
    StormTrack track;
    char id[16];
    std::snprintf(id, sizeof id, "AL%02d%04d", static_cast<int>(rng.next_index(98) + 1), year);
    track.storm_id = id;
    track.name = "TESTSTORM";
    const int n = 3 + static_cast<int>(rng.next_index(37));
    UtcTime t = from_civil({year, 7, 1 + static_cast<int>(rng.next_index(20)), 0, 0, 0});
    double lat = 10.0 + 0.1 * static_cast<double>(rng.next_index(200));
    double lon = -80.0 + 0.1 * static_cast<double>(rng.next_index(400));
    // Well-formed HURDAT2 carries tenth-of-degree positions; keep every value
    // on that grid so the round trip is exact.
    auto tenth = [](double v) { return std::round(v * 10.0) / 10.0; };
    for (int i = 0; i < n; ++i) {
        TrackFix fix;
        fix.time = t;
        fix.record_id = rng.next_index(10) == 0 ? 'L' : ' ';
        const char* statuses[] = {"TD", "TS", "HU", "EX"};
        fix.status = statuses[rng.next_index(4)];
        fix.lat = tenth(lat);
        fix.lon = tenth(lon);
        if (rng.next_index(10) != 0) fix.vmax = static_cast<double>(20 + rng.next_index(120));
        if (rng.next_index(10) != 0) fix.pmin = static_cast<double>(900 + rng.next_index(120));
        track.fixes.push_back(fix);
        t = t + 6 * 3600;
        lat = tenth(lat + 0.1);
        lon = tenth(lon + 0.2);
    }
    return track;
}

bool tracks_equal(const StormTrack& a, const StormTrack& b) {
    if (a.storm_id != b.storm_id || a.name != b.name || a.fixes.size() != b.fixes.size())
        return false;
    for (std::size_t i = 0; i < a.fixes.size(); ++i) {
        const TrackFix& fa = a.fixes[i];
        const TrackFix& fb = b.fixes[i];
        if (fa.time != fb.time || fa.record_id != fb.record_id || fa.status != fb.status)
            return false;
        if (fa.lat != fb.lat || fa.lon != fb.lon) return false;
        if (fa.vmax.has_value() != fb.vmax.has_value() || fa.pmin.has_value() != fb.pmin.has_value())
            return false;
        if (fa.vmax && *fa.vmax != *fb.vmax) return false;
        if (fa.pmin && *fa.pmin != *fb.pmin) return false;
    }
    return true;
}

} // namespace

TEST_CASE("parse_hurdat2 transcribes header and rows") {
    const Hurdat2Result result = parse_hurdat2_text(kIrene);
    REQUIRE(result.tracks.size() == 1);
    REQUIRE(result.rejected.empty());
    const StormTrack& track = result.tracks[0];
    CHECK(track.storm_id == "AL092011");
    CHECK(track.name == "IRENE");
    REQUIRE(track.fixes.size() == 3);

    const TrackFix& fix = track.fixes[0];
    CHECK(fix.time == from_civil({2011, 8, 21, 0, 0, 0}));
    CHECK(fix.status == "TS");
    CHECK(fix.lat == doctest::Approx(15.0));
    CHECK(fix.lon == doctest::Approx(-59.0)); // W suffix negates
    CHECK(*fix.vmax == doctest::Approx(45.0));
    CHECK(*fix.pmin == doctest::Approx(1011.0));

    CHECK(track.fixes[2].record_id == 'L');
    CHECK_FALSE(track.fixes[2].vmax.has_value()); // -99 sentinel
}

TEST_CASE("parse_hurdat2 empty input and per-track rejection") {
    CHECK(parse_hurdat2_text("").tracks.empty());

    SUBCASE("row count mismatch rejects only that track") {
        const std::string text = std::string("AL012000, ALPHA, 3,\n"
                                             "20000801, 0000,  , TS, 15.0N, 59.0W, 45, 1011,\n") +
                                 kIrene;
        const Hurdat2Result result = parse_hurdat2_text(text);
        REQUIRE(result.tracks.size() == 1);
        CHECK(result.tracks[0].storm_id == "AL092011");
        REQUIRE(result.rejected.size() == 1);
        CHECK(result.rejected[0].storm_id == "AL012000");
    }
    SUBCASE("bad hemisphere suffix") {
        const std::string text = "AL012000, ALPHA, 1,\n"
                                 "20000801, 0000,  , TS, 15.0X, 59.0W, 45, 1011,\n";
        const Hurdat2Result result = parse_hurdat2_text(text);
        CHECK(result.tracks.empty());
        REQUIRE(result.rejected.size() == 1);
        CHECK(result.rejected[0].line == 2);
    }
    SUBCASE("short row") {
        const std::string text = "AL012000, ALPHA, 1,\n"
                                 "20000801, 0000,  , TS, 15.0N,\n";
        CHECK(parse_hurdat2_text(text).rejected.size() == 1);
    }
    SUBCASE("non-monotone times") {
        const std::string text = "AL012000, ALPHA, 2,\n"
                                 "20000801, 0600,  , TS, 15.0N, 59.0W, 45, 1011,\n"
                                 "20000801, 0000,  , TS, 15.5N, 59.5W, 45, 1010,\n";
        const Hurdat2Result result = parse_hurdat2_text(text);
        CHECK(result.tracks.empty());
        REQUIRE(result.rejected.size() == 1);
        CHECK(result.rejected[0].reason.find("increasing") != std::string::npos);
    }
    SUBCASE("out-of-range latitude") {
        const std::string text = "AL012000, ALPHA, 1,\n"
                                 "20000801, 0000,  , TS, 95.0N, 59.0W, 45, 1011,\n";
        CHECK(parse_hurdat2_text(text).rejected.size() == 1);
    }
    SUBCASE("CRLF line endings parse identically") {
        std::string crlf = kIrene;
        std::string with_cr;
        for (char c : crlf) {
            if (c == '\n') with_cr += '\r';
            with_cr += c;
        }
        const Hurdat2Result result = parse_hurdat2_text(with_cr);
        REQUIRE(result.tracks.size() == 1);
        CHECK(tracks_equal(result.tracks[0], parse_hurdat2_text(kIrene).tracks[0]));
    }
}

TEST_CASE("hurdat2 round-trip is field-identical over random tracks") {
    std::vector<StormTrack> tracks;
    for (int i = 0; i < 50; ++i) tracks.push_back(random_track(1000 + i, 1990 + i % 30));
    const std::string text = format_hurdat2(tracks);
    const Hurdat2Result result = parse_hurdat2_text(text);
    REQUIRE(result.rejected.empty());
    REQUIRE(result.tracks.size() == tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) CHECK(tracks_equal(tracks[i], result.tracks[i]));
}

TEST_CASE("interpolate_center") {
    StormTrack track;
    track.storm_id = "AL012000";
    TrackFix a, b;
    a.time = from_civil({2000, 8, 1, 0, 0, 0});
    a.lat = 10.0;
    a.lon = -50.0;
    b.time = from_civil({2000, 8, 1, 6, 0, 0});
    b.lat = 12.0;
    b.lon = -52.0;
    track.fixes = {a, b};

    SUBCASE("exact fix time returns the fix") {
        const LatLon p = interpolate_center(track, a.time);
        CHECK(p.lat == 10.0);
        CHECK(p.lon == -50.0);
    }
    SUBCASE("linear midpoint") {
        const LatLon p = interpolate_center(track, a.time + 3 * 3600);
        CHECK(p.lat == doctest::Approx(11.0));
        CHECK(p.lon == doctest::Approx(-51.0));
    }
    SUBCASE("outside the span throws") {
        CHECK_THROWS_AS(interpolate_center(track, a.time - 1), DataError);
        CHECK_THROWS_AS(interpolate_center(track, b.time + 1), DataError);
    }
    SUBCASE("single-fix track") {
        StormTrack single;
        single.storm_id = "AL022000";
        single.fixes = {a};
        const LatLon p = interpolate_center(single, a.time);
        CHECK(p.lat == 10.0);
        CHECK_THROWS_AS(interpolate_center(single, a.time + 1), DataError);
    }
    SUBCASE("continuity at 1 second across fix boundaries") {
        // Slow track (0.01 deg / 6 h) so a boundary jump would dwarf the
        // genuine 1-second displacement.
        StormTrack slow;
        slow.storm_id = "AL032000";
        for (int i = 0; i < 4; ++i) {
            TrackFix fix;
            fix.time = a.time + i * 6 * 3600;
            fix.lat = 10.0 + 0.01 * i;
            fix.lon = -50.0 - 0.01 * i;
            slow.fixes.push_back(fix);
        }
        for (const UtcTime t : {slow.fixes[1].time, slow.fixes[2].time,
                                slow.fixes[1].time + 3 * 3600}) {
            const LatLon p = interpolate_center(slow, t);
            for (const std::int64_t eps : {-1, 1}) {
                const LatLon q = interpolate_center(slow, t + eps);
                CHECK(std::abs(q.lat - p.lat) < 1e-6);
                CHECK(std::abs(q.lon - p.lon) < 1e-6);
            }
        }
    }
}
