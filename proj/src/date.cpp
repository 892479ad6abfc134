#include "ponzi/date.hpp"

#include "ponzi/errors.hpp"

#include <chrono>
#include <cstdio>

namespace ponzi {

namespace {

namespace chr = std::chrono;

int parse_digits(std::string_view text, std::size_t pos, std::size_t count, std::string_view whole) {
    if (pos + count > text.size()) throw InputError("malformed date/time '" + std::string(whole) + "'");
    int v = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw InputError("malformed date/time '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

chr::year_month_day to_ymd(Date d) { return chr::year_month_day{chr::sys_days{chr::days{d.days}}}; }

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
        throw InputError(std::string("invalid calendar date ") + buf);
    }
    return {static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("malformed date '" + std::string(text) + "' (want YYYY-MM-DD)");
    return from_ymd(parse_digits(text, 0, 4, text), static_cast<unsigned>(parse_digits(text, 5, 2, text)),
                    static_cast<unsigned>(parse_digits(text, 8, 2, text)));
}

std::string Date::str() const {
    const auto ymd = to_ymd(*this);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

Timestamp Timestamp::parse(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
    if (text.size() < 20 || (text[10] != 'T' && text[10] != 't') || text[13] != ':' || text[16] != ':')
        throw InputError("malformed timestamp '" + std::string(text) + "'");
    const Date d = Date::parse(text.substr(0, 10));
    const int hh = parse_digits(text, 11, 2, text);
    const int mm = parse_digits(text, 14, 2, text);
    const int ss = parse_digits(text, 17, 2, text);
    if (hh > 23 || mm > 59 || ss > 60) throw InputError("malformed timestamp '" + std::string(text) + "'");
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
    std::int64_t offset = 0;
    const std::string_view zone = text.substr(pos);
    if (zone == "Z" || zone == "z") {
        offset = 0;
    } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
        const int oh = parse_digits(zone, 1, 2, text);
        const int om = parse_digits(zone, 4, 2, text);
        offset = (zone[0] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
    } else {
        throw InputError("timestamp '" + std::string(text) + "' lacks a UTC offset");
    }
    return {static_cast<std::int64_t>(d.days) * 86400 + hh * 3600 + mm * 60 + ss - offset};
}

std::string Timestamp::str() const {
    const Date d = date();
    const std::int64_t rem = seconds - static_cast<std::int64_t>(d.days) * 86400;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", d.str().c_str(), static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return buf;
}

Date Timestamp::date() const {
    std::int64_t days = seconds / 86400;
    if (seconds % 86400 < 0) days -= 1;
    return {static_cast<std::int32_t>(days)};
}

}  // namespace ponzi
