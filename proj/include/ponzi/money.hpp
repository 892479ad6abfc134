#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ponzi {

using Satoshi = std::int64_t;
inline constexpr Satoshi kSatPerBtc = 100'000'000;

/// Rounds num/den to the nearest integer, ties to even. den must be non-zero.
std::int64_t round_half_even(__int128 num, __int128 den);

/// Renders a count of hundredths as a fixed two-decimal string ("-0.07").
std::string format_hundredths(std::int64_t v);

/// Signed US dollar amount held as integer cents.
struct UsdCents {
    std::int64_t cents = 0;

    constexpr UsdCents& operator+=(UsdCents o) { cents += o.cents; return *this; }
    constexpr UsdCents& operator-=(UsdCents o) { cents -= o.cents; return *this; }
    friend constexpr UsdCents operator+(UsdCents a, UsdCents b) { return {a.cents + b.cents}; }
    friend constexpr UsdCents operator-(UsdCents a, UsdCents b) { return {a.cents - b.cents}; }
    friend constexpr UsdCents operator-(UsdCents a) { return {-a.cents}; }
    friend constexpr auto operator<=>(UsdCents, UsdCents) = default;

    double dollars() const { return static_cast<double>(cents) / 100.0; }
    /// "1234.50", "-0.07"
    std::string str() const;
};

constexpr UsdCents abs(UsdCents v) { return {v.cents < 0 ? -v.cents : v.cents}; }

/// BTC price in USD, fixed point with 8 fractional digits.
struct UsdPerBtc {
    std::int64_t e8 = 0;
    friend constexpr auto operator<=>(UsdPerBtc, UsdPerBtc) = default;

    /// Parses "433.47"; at most 8 fractional digits, strictly positive.
    static UsdPerBtc parse(std::string_view text);
    std::string str() const;
};

/// value/10^8 * price, exact, rounded half-even to cents.
UsdCents sat_to_usd(Satoshi value, UsdPerBtc price);

/// Same as sat_to_usd but for a rational satoshi amount num/den.
UsdCents sat_ratio_to_usd(__int128 sat_num, __int128 sat_den, UsdPerBtc price);

}  // namespace ponzi
