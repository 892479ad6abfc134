#include "ponzi/money.hpp"

#include "ponzi/errors.hpp"

#include <cstdio>

namespace ponzi {

std::int64_t round_half_even(__int128 num, __int128 den) {
    if (den == 0) throw InvariantError("round_half_even: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    __int128 q = num / den;
    __int128 r = num % den;
    // C++ division truncates toward zero; normalise to floor.
    if (r < 0) { q -= 1; r += den; }
    const __int128 twice = 2 * r;
    if (twice > den || (twice == den && (q % 2 != 0))) q += 1;
    return static_cast<std::int64_t>(q);
}

std::string UsdCents::str() const { return format_hundredths(cents); }

std::string format_hundredths(std::int64_t v) {
    const bool neg = v < 0;
    const unsigned long long mag = neg ? 0ULL - static_cast<unsigned long long>(v)
                                       : static_cast<unsigned long long>(v);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%02llu", neg ? "-" : "", mag / 100, mag % 100);
    return buf;
}

UsdPerBtc UsdPerBtc::parse(std::string_view text) {
    if (text.empty()) throw InputError("empty price");
    std::int64_t whole = 0, frac = 0;
    int frac_digits = 0;
    bool seen_dot = false, any_digit = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) throw InputError("malformed price '" + std::string(text) + "'");
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw InputError("malformed price '" + std::string(text) + "'");
        any_digit = true;
        if (seen_dot) {
            if (++frac_digits > 8)
                throw InputError("price '" + std::string(text) + "' has more than 8 fractional digits");
            frac = frac * 10 + (c - '0');
        } else {
            whole = whole * 10 + (c - '0');
            if (whole > 10'000'000'000LL) throw InputError("price out of range '" + std::string(text) + "'");
        }
    }
    if (!any_digit) throw InputError("malformed price '" + std::string(text) + "'");
    for (int i = frac_digits; i < 8; ++i) frac *= 10;
    UsdPerBtc p{whole * 100'000'000LL + frac};
    if (p.e8 <= 0) throw InputError("price must be strictly positive: '" + std::string(text) + "'");
    return p;
}

std::string UsdPerBtc::str() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%lld.%08lld", static_cast<long long>(e8 / 100'000'000LL),
                  static_cast<long long>(e8 % 100'000'000LL));
    std::string s = buf;
    // keep at least two fractional digits
    while (s.size() > 0 && s.back() == '0' && s.size() - s.find('.') > 3) s.pop_back();
    return s;
}

UsdCents sat_to_usd(Satoshi value, UsdPerBtc price) {
    // cents = sat * e8 * 100 / (1e8 * 1e8)
    const __int128 num = static_cast<__int128>(value) * price.e8;
    return {round_half_even(num, static_cast<__int128>(100'000'000'000'000LL))};
}

UsdCents sat_ratio_to_usd(__int128 sat_num, __int128 sat_den, UsdPerBtc price) {
    return {round_half_even(sat_num * price.e8, sat_den * static_cast<__int128>(100'000'000'000'000LL))};
}

}  // namespace ponzi
