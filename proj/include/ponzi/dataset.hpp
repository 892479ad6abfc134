#pragma once

#include "ponzi/coredata.hpp"
#include "ponzi/txclass.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ponzi {

/// Inclusive day window [first, last].
struct DayRange {
    Date first;
    Date last;

    std::int32_t size() const { return last - first + 1; }
    bool contains(Date d) const { return first <= d && d <= last; }
    friend bool operator==(DayRange, DayRange) = default;

    /// "2015-09-27..2016-06-28"
    static DayRange parse(std::string_view text);
    std::string str() const;
};

/// How build_dataset chooses the analysis window.
struct WindowSpec {
    enum class Mode { auto_trim, explicit_range, all } mode = Mode::auto_trim;
    DayRange range{};         // explicit_range only
    double coverage = 0.98;   // auto_trim only

    static WindowSpec automatic(double coverage = 0.98) { return {Mode::auto_trim, {}, coverage}; }
    static WindowSpec exactly(DayRange r) { return {Mode::explicit_range, r, 0.0}; }
    static WindowSpec everything() { return {Mode::all, {}, 0.0}; }
};

/// Shortest window holding at least ceil(coverage * N) of the given days
/// (earliest on ties). `days` need not be sorted. Throws on empty input.
DayRange trim_window(std::vector<Date> days, double coverage);

struct BuildReport {
    txclass::CleaningReport cleaning;
    std::size_t outside_window = 0;
    DayRange window{};
};

/// Immutable, day-indexed bundle of cleaned typed transactions plus the
/// roster, wallet directory and price table they were typed against.
class SchemeDataset {
public:
    const std::vector<txclass::TypedTx>& transactions() const { return txs_; }
    const Roster& roster() const { return roster_; }
    const WalletDirectory& wallets() const { return wallets_; }
    const PriceTable& prices() const { return prices_; }
    DayRange window() const { return window_; }

    std::size_t day_count() const { return static_cast<std::size_t>(window_.size()); }
    Date day(std::size_t offset) const { return window_.first + static_cast<std::int32_t>(offset); }
    std::size_t offset(Date d) const { return static_cast<std::size_t>(d - window_.first); }
    /// Transactions dated on window day `offset`, in (time, txid) order.
    std::span<const txclass::TypedTx> on_day(std::size_t offset) const;
    std::span<const txclass::TypedTx> on_day(Date d) const { return on_day(offset(d)); }

private:
    friend SchemeDataset build_dataset(const std::vector<TxRecord>&, std::vector<MemberRecord>, WalletDirectory,
                                       PriceTable, WindowSpec, txclass::CleanMode, BuildReport*);
    std::vector<txclass::TypedTx> txs_;
    std::vector<std::size_t> day_begin_;  // day_count()+1 offsets into txs_
    Roster roster_;
    WalletDirectory wallets_;
    PriceTable prices_;
    DayRange window_{};
};

/// Types and cleans `transactions` against the roster, then keeps those whose
/// UTC date falls inside the chosen window.
SchemeDataset build_dataset(const std::vector<TxRecord>& transactions, std::vector<MemberRecord> roster,
                            WalletDirectory wallets, PriceTable prices, WindowSpec window = WindowSpec::automatic(),
                            txclass::CleanMode mode = txclass::CleanMode::fixpoint, BuildReport* report = nullptr);

}  // namespace ponzi
