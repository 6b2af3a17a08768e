#include "occurlens/time.hpp"

#include "occurlens/error.hpp"

#include <cstdio>
#include <cstring>

namespace occurlens {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

HourStamp to_hour_stamp(const CivilTime& ct) {
    return days_from_civil(ct.year, ct.month, ct.day) * 24 + ct.hour;
}

CivilTime from_hour_stamp(HourStamp h) {
    std::int64_t days = h / 24;
    int hour = static_cast<int>(h % 24);
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    CivilTime ct;
    civil_from_days(days, ct.year, ct.month, ct.day);
    ct.hour = hour;
    return ct;
}

int weekday_of(HourStamp h) {
    std::int64_t days = h / 24;
    if (h % 24 < 0) days -= 1;
    // 1970-01-01 was a Thursday; Monday = 0.
    std::int64_t wd = (days + 3) % 7;
    if (wd < 0) wd += 7;
    return static_cast<int>(wd);
}

int hour_of(HourStamp h) {
    int hour = static_cast<int>(h % 24);
    return hour < 0 ? hour + 24 : hour;
}

int month_index(HourStamp h) {
    return from_hour_stamp(h).month - 1;
}

HourStamp parse_hour_iso(const std::string& s) {
    int y = 0, mo = 0, d = 0, hh = 0, mi = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d", &y, &mo, &d, &sep, &hh, &mi);
    if (n < 5 || (sep != 'T' && sep != ' '))
        throw ParseError("unparsable timestamp: '" + s + "'");
    if (n >= 6 && mi != 0)
        throw ParseError("timestamp not on the hour: '" + s + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh < 0 || hh > 23)
        throw ParseError("timestamp out of range: '" + s + "'");
    return to_hour_stamp(CivilTime{y, mo, d, hh});
}

std::string format_hour_iso(HourStamp h) {
    const CivilTime ct = from_hour_stamp(h);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", ct.year, ct.month, ct.day, ct.hour);
    return buf;
}

TimeEncoding encode_time(HourStamp h) {
    return TimeEncoding{
        hour_of(h) / 23.0,
        weekday_of(h) / 6.0,
        month_index(h) / 11.0,
    };
}

} // namespace occurlens
