#pragma once

#include <cstdint>
#include <string>

namespace cryptotail {

inline constexpr double kSecondsPerDay = 86400.0;

/// Days since 1970-01-01 (UTC) of the calendar day containing `timestamp`.
std::int64_t utc_day(double timestamp);

/// Unix seconds at 00:00:00 UTC of the given civil date.
double utc_seconds(int year, unsigned month, unsigned day);

/// Unix seconds at the first instant of (year, month) shifted by `months`.
double add_months(int year, unsigned month, int months);

/// "YYYY-MM-DD" for a day index from `utc_day`.
std::string iso_date(std::int64_t day);

/// "YYYY-MM-DDTHH:MM:SSZ", with microseconds when the timestamp is fractional.
std::string iso_datetime(double timestamp);

}  // namespace cryptotail
