#include "cryptotail/calendar.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace cryptotail {

namespace chr = std::chrono;

std::int64_t utc_day(double timestamp) {
    return static_cast<std::int64_t>(std::floor(timestamp / kSecondsPerDay));
}

double utc_seconds(int year, unsigned month, unsigned day) {
    const chr::sys_days d{chr::year{year} / chr::month{month} / chr::day{day}};
    return static_cast<double>(d.time_since_epoch().count()) * kSecondsPerDay;
}

double add_months(int year, unsigned month, int months) {
    const auto ym = chr::year{year} / chr::month{month} + chr::months{months};
    const chr::sys_days d{ym / chr::day{1}};
    return static_cast<double>(d.time_since_epoch().count()) * kSecondsPerDay;
}

std::string iso_date(std::int64_t day) {
    const chr::year_month_day ymd{chr::sys_days{chr::days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string iso_datetime(double timestamp) {
    const double whole = std::floor(timestamp);
    const auto micros = static_cast<long>(std::llround((timestamp - whole) * 1e6));
    const auto secs = static_cast<std::int64_t>(whole) + (micros == 1000000 ? 1 : 0);
    const std::int64_t day = secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
    const std::int64_t sod = secs - day * 86400;
    char buf[48];
    const std::string date = iso_date(day);
    if (micros == 0 || micros == 1000000) {
        std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", date.c_str(),
                      static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                      static_cast<int>(sod % 60));
    } else {
        std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d.%06ldZ", date.c_str(),
                      static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                      static_cast<int>(sod % 60), micros);
    }
    return buf;
}

}  // namespace cryptotail
