#pragma once

#include <cstdint>
#include <string>
#include <tuple>

namespace occurlens {

// Hours since 1970-01-01 00:00 (naive local time, no zone arithmetic).
using HourStamp = std::int64_t;

struct CivilTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;  // 0..23
};

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

HourStamp to_hour_stamp(const CivilTime& ct);
CivilTime from_hour_stamp(HourStamp h);

// 0 = Monday .. 6 = Sunday.
int weekday_of(HourStamp h);
int hour_of(HourStamp h);
int month_index(HourStamp h); // 0 = January .. 11 = December

// Parses "YYYY-MM-DDTHH:00" / "YYYY-MM-DD HH:00" (minutes optional, must be 00).
HourStamp parse_hour_iso(const std::string& s);
std::string format_hour_iso(HourStamp h);

struct TimeEncoding {
    double hour_norm;    // hour / 23
    double weekday_norm; // weekday / 6, Monday = 0
    double month_norm;   // month / 11, January = 0
};

TimeEncoding encode_time(HourStamp h);

} // namespace occurlens
