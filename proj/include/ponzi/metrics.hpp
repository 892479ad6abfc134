#pragma once

#include "ponzi/dataset.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ponzi::metrics {

enum class AggregateKind { sum, mean, max };

/// Number of typed transactions dated `day`.
std::size_t dtv(const SchemeDataset& ds, Date day);

/// Per-transaction money-flow contribution: roster-output value for deposits
/// and ponzi transactions, roster-input value for withdrawals.
Satoshi dmf_contribution(const txclass::TypedTx& t);

/// f-aggregate of the day's contributions in USD at the day's price; 0 on empty days.
UsdCents dmf(const SchemeDataset& ds, Date day, AggregateKind f);

/// dmf(sum) / dtv rounded to cents; nullopt when dtv is 0.
std::optional<UsdCents> dfr(const SchemeDataset& ds, Date day);

struct AddressFlow {
    Satoshi dni = 0;         // received in ponzi transactions
    Satoshi dns = 0;         // spent in ponzi transactions
    std::size_t ponzi_txs = 0;
    Satoshi dnw() const { return dni - dns; }
};

/// DNI/DNS per roster address over the day's ponzi transactions. Only
/// addresses with a send or receive role appear.
std::map<std::string, AddressFlow> address_flows(const SchemeDataset& ds, Date day);

Satoshi dni(const SchemeDataset& ds, std::string_view addr, Date day);
Satoshi dns(const SchemeDataset& ds, std::string_view addr, Date day);
Satoshi dnw(const SchemeDataset& ds, std::string_view addr, Date day);

/// Gini index as the exact fraction sum_ij |x_i - x_j| / (2 n^2 mean).
struct GiniRatio {
    __int128 num = 0;
    __int128 den = 1;
    double value() const { return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den)); }
};

/// O(n log n) Gini of non-negative values. nullopt for an empty population;
/// 0 when every value is 0.
std::optional<GiniRatio> gini(std::span<const Satoshi> values);

enum class GiniPopulation {
    active,      // addresses with a ponzi role that day
    all_roster,  // every roster address, inactive ones contributing 0
};

std::optional<double> dgi(const SchemeDataset& ds, Date day, GiniPopulation pop = GiniPopulation::active);

/// Sum of DNW over roster addresses, in satoshi and in USD at the day's price.
Satoshi dnd_sat(const SchemeDataset& ds, Date day);
UsdCents dnd(const SchemeDataset& ds, Date day);

/// Sum of dnd (resp. |dnd|) over the inclusive day range.
UsdCents total_dnd(const SchemeDataset& ds, DayRange days);
UsdCents total_abs_dnd(const SchemeDataset& ds, DayRange days);

struct DayMetrics {
    Date day;
    std::size_t dtv = 0;
    UsdCents dmf_sum, dmf_mean, dmf_max;
    std::optional<UsdCents> dfr;
    std::optional<double> dgi;
    UsdCents dnd;
    Satoshi dnd_sat = 0;
    Satoshi dmf_sum_sat = 0;
    Satoshi ponzi_input_sat = 0;  // roster inputs of ponzi txs; not part of DMF
};

struct DailyOptions {
    GiniPopulation gini_population = GiniPopulation::active;
};

/// One row per window day.
std::vector<DayMetrics> daily_metrics(const SchemeDataset& ds, DailyOptions opts = {});
std::string daily_csv(const std::vector<DayMetrics>& rows);
std::string daily_json(const std::vector<DayMetrics>& rows);

/// Cumulative net worth normalised by transaction count: tnw / count.
struct NormalizedWorth {
    Satoshi tnw = 0;
    std::int64_t count = 1;

    bool negative() const { return tnw < 0; }
    double value() const { return static_cast<double>(tnw) / static_cast<double>(count); }
    /// Exact comparison of tnw/count.
    friend bool operator<(const NormalizedWorth& a, const NormalizedWorth& b) {
        return static_cast<__int128>(a.tnw) * b.count < static_cast<__int128>(b.tnw) * a.count;
    }
    friend bool operator==(const NormalizedWorth& a, const NormalizedWorth& b) {
        return static_cast<__int128>(a.tnw) * b.count == static_cast<__int128>(b.tnw) * a.count;
    }
};

struct LedgerEntry {
    std::string address;
    Date day;
    Satoshi dni = 0;
    Satoshi dns = 0;
    Satoshi dnw = 0;
    std::int64_t ponzi_tx_count_cum = 0;
    Satoshi tnw_cum = 0;
    UsdCents tnw_usd_cum;  // sum of each day's dnw at that day's price
};

enum class CvrDenominator {
    active,      // addresses with at least one ponzi transaction since d_1
    all_roster,  // the whole roster
};

struct CvrPoint {
    Date day;
    std::optional<double> cvr;
    std::size_t active = 0;
    std::size_t victims = 0;
};

/// Per-address cumulative worth over [first, last] (normally the
/// hyperoperation phase). Entries exist only for days an address was active.
class NetWorthLedger {
public:
    NetWorthLedger(const SchemeDataset& ds, DayRange span, CvrDenominator cvr_mode = CvrDenominator::active);

    DayRange span() const { return span_; }
    /// Active-day entries in (address, day) order.
    const std::vector<LedgerEntry>& entries() const { return entries_; }

    /// Sum of dnw from span.first through `day`; 0 before any activity.
    Satoshi tnw(std::string_view addr, Date day) const;
    UsdCents tnw_usd(std::string_view addr, Date day) const;
    std::int64_t ponzi_tx_count(std::string_view addr, Date day) const;
    /// Undefined (nullopt) until the address's first ponzi transaction.
    std::optional<NormalizedWorth> tnw_norm(std::string_view addr, Date day) const;

    /// Addresses that are active by `day`, with their normalised worth.
    std::vector<std::pair<std::string, NormalizedWorth>> standings(Date day) const;

    std::optional<double> cvr(Date day) const;
    const std::vector<CvrPoint>& cvr_series() const { return cvr_; }

    std::string csv() const;

private:
    const LedgerEntry* last_entry(std::string_view addr, Date day) const;

    DayRange span_;
    std::vector<LedgerEntry> entries_;
    std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> by_address_;  // [begin, end) into entries_
    std::vector<CvrPoint> cvr_;
};

}  // namespace ponzi::metrics
