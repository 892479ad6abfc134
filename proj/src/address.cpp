#include "ponzi/address.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <regex>
#include <vector>

namespace ponzi {

namespace {

constexpr std::array<AddressPattern, 3> kPatterns{{
    {AddressKind::P2PKH, "1[a-km-zA-HJ-NP-Z1-9]{25,34}"},
    {AddressKind::P2SH, "3[a-km-zA-HJ-NP-Z1-9]{25,34}"},
    {AddressKind::Bech32, "bc1[a-zA-HJ-NP-Z0-9]{25,39}"},
}};

const std::array<std::regex, 3>& compiled() {
    static const std::array<std::regex, 3> res{
        std::regex(kPatterns[0].regex.begin(), kPatterns[0].regex.end()),
        std::regex(kPatterns[1].regex.begin(), kPatterns[1].regex.end()),
        std::regex(kPatterns[2].regex.begin(), kPatterns[2].regex.end()),
    };
    return res;
}

constexpr std::string_view kBase58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

std::optional<std::vector<std::uint8_t>> base58_decode(std::string_view s) {
    std::vector<std::uint8_t> out;  // big-endian magnitude
    for (char c : s) {
        const auto pos = kBase58.find(c);
        if (pos == std::string_view::npos) return std::nullopt;
        unsigned carry = static_cast<unsigned>(pos);
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            carry += 58u * *it;
            *it = static_cast<std::uint8_t>(carry & 0xff);
            carry >>= 8;
        }
        while (carry) {
            out.insert(out.begin(), static_cast<std::uint8_t>(carry & 0xff));
            carry >>= 8;
        }
    }
    const auto zeros = std::find_if(s.begin(), s.end(), [](char c) { return c != '1'; }) - s.begin();
    out.insert(out.begin(), static_cast<std::size_t>(zeros), 0);
    return out;
}

std::array<std::uint8_t, 32> sha256d(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> a{}, b{};
    SHA256(data.data(), data.size(), a.data());
    SHA256(a.data(), a.size(), b.data());
    return b;
}

std::uint32_t bech32_polymod(const std::vector<std::uint8_t>& values) {
    constexpr std::uint32_t gen[5] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
    std::uint32_t chk = 1;
    for (auto v : values) {
        const std::uint32_t top = chk >> 25;
        chk = ((chk & 0x1ffffff) << 5) ^ v;
        for (int i = 0; i < 5; ++i)
            if ((top >> i) & 1) chk ^= gen[i];
    }
    return chk;
}

}  // namespace

std::string_view to_string(AddressKind kind) {
    switch (kind) {
        case AddressKind::P2PKH: return "P2PKH";
        case AddressKind::P2SH: return "P2SH";
        case AddressKind::Bech32: return "Bech32";
    }
    return "?";
}

std::span<const AddressPattern> address_patterns() { return kPatterns; }

std::optional<AddressKind> match_address(std::string_view text) {
    if (text.size() < 26 || text.size() > 42) return std::nullopt;
    const auto& res = compiled();
    for (std::size_t i = 0; i < kPatterns.size(); ++i)
        if (std::regex_match(text.begin(), text.end(), res[i])) return kPatterns[i].kind;
    return std::nullopt;
}

bool checksum_valid(std::string_view address, AddressKind kind) {
    if (kind == AddressKind::Bech32) {
        // bech32 strings are case-insensitive but must not mix case
        std::string s(address);
        const bool has_upper = std::any_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
        const bool has_lower = std::any_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
        if (has_upper && has_lower) return false;
        std::transform(s.begin(), s.end(), s.begin(), [](char c) { return c >= 'A' && c <= 'Z' ? c + 32 : c; });
        const auto sep = s.rfind('1');
        if (sep == std::string::npos || sep + 7 > s.size()) return false;
        constexpr std::string_view charset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
        std::vector<std::uint8_t> values;
        const std::string hrp = s.substr(0, sep);
        for (char c : hrp) values.push_back(static_cast<std::uint8_t>(c >> 5));
        values.push_back(0);
        for (char c : hrp) values.push_back(static_cast<std::uint8_t>(c & 31));
        for (std::size_t i = sep + 1; i < s.size(); ++i) {
            const auto p = charset.find(s[i]);
            if (p == std::string_view::npos) return false;
            values.push_back(static_cast<std::uint8_t>(p));
        }
        const std::uint32_t pm = bech32_polymod(values);
        return pm == 1 || pm == 0x2bc830a3;  // bech32 or bech32m
    }
    const auto raw = base58_decode(address);
    if (!raw || raw->size() != 25) return false;
    const std::span<const std::uint8_t> body(raw->data(), 21);
    const auto digest = sha256d(body);
    if (!std::equal(digest.begin(), digest.begin() + 4, raw->begin() + 21)) return false;
    const std::uint8_t version = (*raw)[0];
    return kind == AddressKind::P2PKH ? version == 0x00 : version == 0x05;
}

std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> data;
    data.push_back(version);
    data.insert(data.end(), payload.begin(), payload.end());
    const auto digest = sha256d(data);
    data.insert(data.end(), digest.begin(), digest.begin() + 4);

    std::vector<std::uint8_t> digits;  // little-endian base58
    for (auto byte : data) {
        unsigned carry = byte;
        for (auto& d : digits) {
            carry += static_cast<unsigned>(d) << 8;
            d = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        while (carry) {
            digits.push_back(static_cast<std::uint8_t>(carry % 58));
            carry /= 58;
        }
    }
    std::string out;
    for (auto byte : data) {
        if (byte != 0) break;
        out.push_back('1');
    }
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kBase58[*it]);
    return out;
}

bool is_address_alphabet(char c) {
    // union of the base58 alphabet and the bech32 pattern's character class
    if (c >= '0' && c <= '9') return true;
    if (c >= 'a' && c <= 'z') return true;
    if (c >= 'A' && c <= 'Z') return c != 'I' && c != 'O';
    return false;
}

}  // namespace ponzi
