#include "tcstruct/time.hpp"

#include "tcstruct/error.hpp"

#include <cctype>
#include <cstdio>

namespace tcs {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date
// (Howard Hinnant's days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

int parse_digits(const std::string& s, std::size_t pos, std::size_t n, const char* what) {
    if (pos + n > s.size()) throw ParseError(std::string("truncated ") + what + ": '" + s + "'");
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw ParseError(std::string("non-digit in ") + what + ": '" + s + "'");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

} // namespace

UtcTime from_civil(const CivilTime& c) {
    const std::int64_t days = days_from_civil(c.year, c.month, c.day);
    return UtcTime{days * 86400 + c.hour * 3600 + c.minute * 60 + c.second};
}

CivilTime to_civil(UtcTime t) {
    std::int64_t days = t.secs / 86400;
    std::int64_t rem = t.secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem % 3600) / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

std::string format_iso8601(UtcTime t) {
    const CivilTime c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

UtcTime parse_iso8601(const std::string& s) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s[19] != 'Z')
        throw ParseError("bad ISO-8601 timestamp: '" + s + "'");
    CivilTime c;
    c.year = parse_digits(s, 0, 4, "timestamp");
    c.month = parse_digits(s, 5, 2, "timestamp");
    c.day = parse_digits(s, 8, 2, "timestamp");
    c.hour = parse_digits(s, 11, 2, "timestamp");
    c.minute = parse_digits(s, 14, 2, "timestamp");
    c.second = parse_digits(s, 17, 2, "timestamp");
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59 ||
        c.second > 60)
        throw ParseError("out-of-range ISO-8601 timestamp: '" + s + "'");
    return from_civil(c);
}

UtcTime parse_hurdat2_time(const std::string& yyyymmdd, const std::string& hhmm) {
    if (yyyymmdd.size() != 8) throw ParseError("bad HURDAT2 date: '" + yyyymmdd + "'");
    if (hhmm.size() != 4) throw ParseError("bad HURDAT2 time: '" + hhmm + "'");
    CivilTime c;
    c.year = parse_digits(yyyymmdd, 0, 4, "date");
    c.month = parse_digits(yyyymmdd, 4, 2, "date");
    c.day = parse_digits(yyyymmdd, 6, 2, "date");
    c.hour = parse_digits(hhmm, 0, 2, "time");
    c.minute = parse_digits(hhmm, 2, 2, "time");
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59)
        throw ParseError("out-of-range HURDAT2 date/time: '" + yyyymmdd + " " + hhmm + "'");
    return from_civil(c);
}

} // namespace tcs
