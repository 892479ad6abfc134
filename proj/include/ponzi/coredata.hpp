#pragma once

// Canonical data model and file formats: transactions (NDJSON), roster,
// wallet directory and price table (CSV).

#include "ponzi/date.hpp"
#include "ponzi/money.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ponzi {

struct TxIO {
    std::string addr;
    Satoshi value = 0;

    friend bool operator==(const TxIO&, const TxIO&) = default;
};

struct TxRecord {
    std::string txid;  // 64 lowercase hex chars
    Timestamp time;
    bool coinbase = false;
    std::vector<TxIO> inputs;
    std::vector<TxIO> outputs;

    Satoshi input_total() const;
    Satoshi output_total() const;
    /// input_total - output_total; zero for coinbase.
    Satoshi fee() const;

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

/// Ordering used wherever "earlier/later" matters: timestamp, then txid.
inline bool tx_before(const TxRecord& a, const TxRecord& b) {
    return a.time != b.time ? a.time < b.time : a.txid < b.txid;
}

enum class Gender { male, female, unspecified };

struct MemberRecord {
    std::string address;
    std::string member_id;
    std::string country;  // ISO 3166 alpha-2 or empty
    std::optional<Date> registration_date;
    std::optional<int> age;
    Gender gender = Gender::unspecified;

    friend bool operator==(const MemberRecord&, const MemberRecord&) = default;
};

enum class WalletCategory { unknown, exchanges, pools, generic, mixers, gambling, ponzi, darkweb };
inline constexpr std::size_t kWalletCategoryCount = 8;

std::string_view to_string(WalletCategory c);
std::string_view to_string(Gender g);
/// Throws InputError for anything outside the eight category names.
WalletCategory parse_category(std::string_view text);
Gender parse_gender(std::string_view text);
bool is_iso_country(std::string_view code);
bool is_txid(std::string_view text);

struct WalletEntry {
    std::string address;
    std::string wallet_id;
    WalletCategory category = WalletCategory::unknown;
};

/// Address -> wallet lookup. Unlisted addresses are their own singleton,
/// unknown-category wallet.
class WalletDirectory {
public:
    WalletDirectory() = default;
    explicit WalletDirectory(std::vector<WalletEntry> entries);

    WalletEntry lookup(std::string_view address) const;
    WalletCategory category(std::string_view address) const;
    std::string wallet_id(std::string_view address) const;
    /// Number of listed addresses in the wallet; 1 for unlisted singletons.
    std::size_t wallet_size(std::string_view wallet_id) const;
    const std::vector<WalletEntry>& entries() const { return entries_; }

private:
    std::vector<WalletEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_address_;
    std::unordered_map<std::string, std::size_t> sizes_;
};

class PriceTable {
public:
    PriceTable() = default;
    explicit PriceTable(std::map<Date, UsdPerBtc> prices);

    /// Throws InputError when the date has no price.
    UsdPerBtc at(Date day) const;
    bool contains(Date day) const { return prices_.count(day) != 0; }
    UsdCents to_usd(Satoshi value, Date day) const { return sat_to_usd(value, at(day)); }
    const std::map<Date, UsdPerBtc>& prices() const { return prices_; }

private:
    std::map<Date, UsdPerBtc> prices_;
};

/// The Ponzi-address roster: validated, unique addresses with member metadata.
class Roster {
public:
    Roster() = default;
    explicit Roster(std::vector<MemberRecord> members);

    bool contains(std::string_view address) const;
    const MemberRecord* find(std::string_view address) const;
    const std::vector<MemberRecord>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

private:
    std::vector<MemberRecord> members_;
    std::unordered_map<std::string, std::size_t> index_;
};

// ---- loaders -----------------------------------------------------------

std::vector<TxRecord> parse_transactions(std::string_view ndjson, const std::string& source);
std::vector<TxRecord> load_transactions(const std::string& path);
/// One transaction as a single NDJSON line (no trailing newline).
std::string to_ndjson_line(const TxRecord& tx);
std::string to_ndjson(const std::vector<TxRecord>& txs);

std::vector<MemberRecord> parse_roster(std::string_view csv_text, const std::string& source);
std::vector<MemberRecord> load_roster(const std::string& path);
std::string roster_csv(const std::vector<MemberRecord>& members);

WalletDirectory parse_wallets(std::string_view csv_text, const std::string& source);
WalletDirectory load_wallets(const std::string& path);
std::string wallets_csv(const std::vector<WalletEntry>& entries);

PriceTable parse_prices(std::string_view csv_text, const std::string& source);
PriceTable load_prices(const std::string& path);
std::string prices_csv(const PriceTable& prices);

std::string read_file(const std::string& path);

}  // namespace ponzi
