#pragma once

// Member classification: daily victim labels, daily top-k rankings,
// month-persistent likely scammers and the scammer report.

#include "ponzi/metrics.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ponzi::classify {

enum class Label { victim, non_victim, unlabeled };

std::string_view to_string(Label l);

Label label(const metrics::NetWorthLedger& ledger, std::string_view addr, Date day);

using Ranked = std::pair<std::string, metrics::NormalizedWorth>;

/// Top-k active addresses by normalised worth on `day`, descending, ties by address.
std::vector<Ranked> rank_daily(const metrics::NetWorthLedger& ledger, Date day, std::size_t k = 10);

struct ScammerOptions {
    std::size_t top_k = 10;
    /// Ignore partial calendar months at either end of the phase.
    bool full_months_only = false;
};

struct ScammerSearch {
    /// calendar month ("YYYY-MM") -> union of the daily top-k lists in that month
    std::map<std::string, std::set<std::string>> monthly;
    /// intersection of every monthly set
    std::set<std::string> scammers;
};

/// Runs the persistence procedure over the ledger's span. Throws InputError
/// when the span is shorter than one calendar month.
ScammerSearch likely_scammers(const metrics::NetWorthLedger& ledger, ScammerOptions opts = {});

struct Counterparty {
    std::string address;
    std::string wallet_id;
    UsdCents usd;
    std::string txid;
};

struct ScammerRow {
    std::string address;
    UsdCents final_tnw;
    Satoshi final_tnw_sat = 0;
    std::size_t wallet_size = 1;
    std::optional<Date> registration_date;
    std::optional<Counterparty> top_deposit_from;
    std::optional<Counterparty> top_withdrawal_to;
};

/// Largest-USD deposit to `addr` and the input address contributing most to it.
std::optional<Counterparty> top_deposit_from(const SchemeDataset& ds, std::string_view addr);
/// Largest-USD withdrawal from `addr` and the non-roster output receiving most of it.
std::optional<Counterparty> top_withdrawal_to(const SchemeDataset& ds, std::string_view addr);

/// Report rows with positive final worth, sorted by final worth (USD)
/// descending, then address.
std::vector<ScammerRow> scammer_report(const SchemeDataset& ds, const metrics::NetWorthLedger& ledger,
                                       const std::set<std::string>& addresses);

std::string scammers_csv(const std::vector<ScammerRow>& rows);
std::string scammers_json(const std::vector<ScammerRow>& rows);
std::string victims_csv(const std::vector<metrics::CvrPoint>& series);
std::string victims_json(const std::vector<metrics::CvrPoint>& series);

}  // namespace ponzi::classify
