#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ponzi {

/// Marker used in transaction records for outputs whose script has no address.
inline constexpr std::string_view kUnparseableAddress = "unparseable";

enum class AddressKind { P2PKH, P2SH, Bech32 };

std::string_view to_string(AddressKind kind);

/// The three address regexes, in ECMAScript syntax.
struct AddressPattern {
    AddressKind kind;
    std::string_view regex;
};
std::span<const AddressPattern> address_patterns();

/// Full-string match against the address regexes. No checksum check.
std::optional<AddressKind> match_address(std::string_view text);

/// Base58Check (P2PKH/P2SH) or bech32 (segwit v0) checksum verification.
bool checksum_valid(std::string_view address, AddressKind kind);

/// Base58Check encoding of version byte + payload.
std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload);

/// True for characters that may appear in a base58 or bech32 address body.
bool is_address_alphabet(char c);

}  // namespace ponzi
