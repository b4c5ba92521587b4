#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace mccs {

/// Calendar date with day resolution. Thin value wrapper over std::chrono::sys_days.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses ISO `YYYY-MM-DD`; throws ArgumentError on malformed input.
    static Date parse(std::string_view iso);

    std::string iso() const;
    constexpr std::chrono::sys_days sys() const { return days_; }
    constexpr long serial() const { return days_.time_since_epoch().count(); }
    unsigned weekday() const;  // 0 = Sunday ... 6 = Saturday

    Date plus_days(long n) const { return Date(days_ + std::chrono::days{n}); }
    Date plus_weeks(long n) const { return plus_days(7 * n); }
    Date plus_years(int n) const;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;
    friend constexpr bool operator==(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// Days between two dates (b - a).
inline long days_between(const Date& a, const Date& b) { return b.serial() - a.serial(); }

}  // namespace mccs
