#pragma once

#include "ponzi/coredata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ponzi::txclass {

enum class TxKind { deposit, ponzi, withdrawal };

std::string_view to_string(TxKind kind);
TxKind parse_kind(std::string_view text);

/// A transaction typed relative to the roster.
struct TypedTx {
    TxRecord tx;
    TxKind kind = TxKind::deposit;
    Satoshi ponzi_inputs = 0;   // input value from roster addresses
    Satoshi ponzi_outputs = 0;  // output value to roster addresses
    Date day;
    // distinct roster addresses on each side, sorted
    std::vector<std::string> roster_inputs;
    std::vector<std::string> roster_outputs;
};

/// Types a transaction; nullopt when no roster address appears on either side.
std::optional<TypedTx> classify(const TxRecord& tx, const Roster& roster);

/// Classifies every transaction, drops irrelevant ones, sorts by (time, txid).
std::vector<TypedTx> classify_all(const std::vector<TxRecord>& txs, const Roster& roster);

enum class CleanMode {
    /// Deposit/withdrawal rules are checked against the ponzi transactions that
    /// survive the earlier rules. The result is a fixpoint of cleaning.
    fixpoint,
    /// Deposit/withdrawal rules are checked once against every ponzi-kind
    /// transaction, including those removed as self-change payments.
    single_pass,
};

struct CleaningReport {
    std::size_t input = 0;
    std::size_t coinbase_deposits = 0;
    std::size_t single_address_ponzi = 0;
    std::size_t unfollowed_deposits = 0;
    std::size_t unpreceded_withdrawals = 0;
    std::size_t deposits = 0;
    std::size_t ponzi = 0;
    std::size_t withdrawals = 0;

    std::string to_json() const;
};

/// Applies the four cleaning rules in order:
///  (a) coinbase deposits,
///  (b) ponzi transactions touching a single roster address,
///  (c) deposits to an address with no strictly later ponzi transaction on it,
///  (d) withdrawals from an address with no strictly earlier ponzi transaction on it.
/// "Later"/"earlier" compare (time, txid). Input must be sorted by (time, txid).
std::vector<TypedTx> clean(const std::vector<TypedTx>& typed, CleanMode mode = CleanMode::fixpoint,
                           CleaningReport* report = nullptr);

struct Roles {
    bool send = false;
    bool receive = false;
    friend bool operator==(Roles, Roles) = default;
};

/// Role of a roster address in a ponzi transaction (input side = send).
Roles roles(const TypedTx& tx, std::string_view addr);

/// Typed NDJSON: the transaction object plus a "kind" field.
std::string typed_ndjson(const std::vector<TypedTx>& typed);

}  // namespace ponzi::txclass
