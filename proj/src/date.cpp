#include "mccs/date.hpp"

#include <charconv>
#include <cstdio>

#include "mccs/errors.hpp"

namespace mccs {

using namespace std::chrono;

Date::Date(int y, unsigned m, unsigned d) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw ArgumentError("invalid calendar date");
    days_ = sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ArgumentError("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    int y = 0;
    unsigned m = 0, d = 0;
    auto ok = [&](std::string_view part, auto& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && ptr == part.data() + part.size();
    };
    if (!ok(iso.substr(0, 4), y) || !ok(iso.substr(5, 2), m) || !ok(iso.substr(8, 2), d))
        throw ArgumentError("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    return Date(y, m, d);
}

std::string Date::iso() const {
    const year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

unsigned Date::weekday() const { return std::chrono::weekday{days_}.c_encoding(); }

Date Date::plus_years(int n) const {
    year_month_day ymd{days_};
    ymd += years{n};
    if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
    return Date(sys_days{ymd});
}

}  // namespace mccs
