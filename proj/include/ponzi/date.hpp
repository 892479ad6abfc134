#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ponzi {

/// UTC calendar date, stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    friend constexpr auto operator<=>(Date, Date) = default;
    friend constexpr Date operator+(Date d, std::int32_t n) { return {d.days + n}; }
    friend constexpr Date operator-(Date d, std::int32_t n) { return {d.days - n}; }
    friend constexpr std::int32_t operator-(Date a, Date b) { return a.days - b.days; }

    static Date from_ymd(int year, unsigned month, unsigned day);
    /// Strict YYYY-MM-DD.
    static Date parse(std::string_view text);
    std::string str() const;

    int year() const;
    unsigned month() const;
    unsigned day() const;
    /// Calendar month key, year*12 + (month-1).
    int month_index() const { return year() * 12 + static_cast<int>(month()) - 1; }
};

/// UTC instant with second precision (seconds since the Unix epoch).
struct Timestamp {
    std::int64_t seconds = 0;

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

    /// RFC 3339, e.g. "2016-02-29T10:00:00Z" or with a numeric offset.
    static Timestamp parse(std::string_view text);
    /// Always "YYYY-MM-DDTHH:MM:SSZ".
    std::string str() const;
    Date date() const;
};

}  // namespace ponzi
