#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace tcs {

// UTC instant with second resolution, stored as seconds since
// 1970-01-01T00:00:00Z. The epoch is midnight-aligned, so synoptic-cadence
// congruence tests reduce to a modulus on the raw count.
struct UtcTime {
    std::int64_t secs = 0;

    auto operator<=>(const UtcTime&) const = default;

    UtcTime operator+(std::int64_t dt) const { return UtcTime{secs + dt}; }
    UtcTime operator-(std::int64_t dt) const { return UtcTime{secs - dt}; }
    std::int64_t operator-(UtcTime other) const { return secs - other.secs; }
};

struct CivilTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

UtcTime from_civil(const CivilTime& c);
CivilTime to_civil(UtcTime t);

// "2011-08-21T00:00:00Z"
std::string format_iso8601(UtcTime t);
// Accepts the exact format above (trailing 'Z' required). Throws ParseError.
UtcTime parse_iso8601(const std::string& s);

// HURDAT2 date/time columns: "YYYYMMDD" and "HHMM".
UtcTime parse_hurdat2_time(const std::string& yyyymmdd, const std::string& hhmm);

inline constexpr std::int64_t kSecondsPerHour = 3600;

} // namespace tcs
