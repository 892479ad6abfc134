#pragma once

// Deterministic synthetic Ponzi scheme: transactions, roster, wallets and
// prices, plus the ground truth every analysis stage should recover.

#include "ponzi/coredata.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ponzi::simgen {

inline constexpr std::string_view kPrngId = "mt19937_64";

struct CyclePlan {
    std::int64_t peak_day = 0;  // offset from start_date
    std::int64_t peak_dtv = 0;
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t members = 200;  // including scammers
    std::int64_t scammers = 10;
    std::int64_t days = 200;
    std::int64_t bootstrap_days = 30;
    std::vector<CyclePlan> cycles = {{80, 300}};
    double collapse_decay = 0.7;
    double leak_fraction = 0.0;
    Satoshi fee_sat = 0;  // multiple of 100
    std::map<std::string, std::int64_t> countries = {{"ID", 5}, {"IN", 3}, {"TH", 2}};
    /// same-day funding deposits per ponzi transaction, in [0, 1]
    double deposit_rate = 1.0;
    /// withdrawals per ponzi transaction, >= 0
    double withdrawal_rate = 1.0;
    Date start_date = Date::from_ymd(2016, 1, 1);
    UsdPerBtc price = UsdPerBtc::parse("400.00");
    Satoshi unit_min_sat = 1'000;
    Satoshi unit_max_sat = 100'000;

    /// Flat JSON object; absent keys keep their defaults, unknown keys are errors.
    static SimConfig from_json(std::string_view text, const std::string& source);
    std::string to_json() const;
    /// Throws InputError on inconsistent or infeasible settings.
    void validate() const;
};

/// Daily volume target. Bootstrap ramps up to theta = floor(P1/10) on day
/// bootstrap_days; each cycle rises and falls log-linearly between theta-level
/// troughs (midpoints between peaks); the last cycle is symmetric; collapse
/// decays geometrically from theta.
struct Envelope {
    std::vector<std::int64_t> dtv;
    std::int64_t theta = 0;
    std::int64_t hyper_start = 0;
    std::int64_t hyper_end = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> cycle_bounds;  // (starts, ends)
};
Envelope envelope(const SimConfig& cfg);

struct GroundTruth {
    Date origin;
    std::int64_t bootstrap_end = 0;  // day offsets
    std::int64_t hyper_start = 0;
    std::int64_t hyper_end = 0;
    std::vector<std::int64_t> peak_days;
    std::vector<std::string> scammers;  // sorted
    Satoshi total_leak_sat = 0;
    Satoshi total_fee_sat = 0;  // ponzi transactions only
    std::vector<Satoshi> per_day_dnd_sat;
    std::vector<std::int64_t> per_day_dtv;
    UsdCents total_dnd_usd;  // per-day dnd converted at the day price, summed
    std::map<std::pair<std::string, std::string>, Satoshi> geo_totals;
    std::size_t deposits = 0, ponzi = 0, withdrawals = 0;

    std::string to_json(const SimConfig& cfg) const;
};

struct SimOutput {
    std::vector<TxRecord> transactions;  // (time, txid) order
    std::vector<MemberRecord> roster;
    std::vector<WalletEntry> wallets;
    PriceTable prices;
    GroundTruth truth;
};

SimOutput generate(const SimConfig& cfg);

/// File name -> contents for the dataset directory: transactions.ndjson,
/// roster.csv, wallets.csv, prices.csv, groundtruth.json.
std::vector<std::pair<std::string, std::string>> dataset_files(const SimOutput& out, const SimConfig& cfg);

/// Uniform integer in [lo, hi] by rejection sampling; identical on every platform.
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);

}  // namespace ponzi::simgen
