#include "ponzi/dataset.hpp"

#include "ponzi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ponzi {

DayRange DayRange::parse(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) throw InputError("day range must look like A..B, got '" + std::string(text) + "'");
    DayRange r{Date::parse(text.substr(0, sep)), Date::parse(text.substr(sep + 2))};
    if (r.last < r.first) throw InputError("day range " + std::string(text) + " is reversed");
    return r;
}

std::string DayRange::str() const { return first.str() + ".." + last.str(); }

DayRange trim_window(std::vector<Date> days, double coverage) {
    if (days.empty()) throw InputError("cannot choose an analysis window: no transactions");
    if (!(coverage > 0.0 && coverage <= 1.0)) throw InputError("window coverage must be in (0, 1]");
    std::sort(days.begin(), days.end());
    const auto n = days.size();
    const auto need = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(n) - 1e-9));
    const std::size_t k = std::max<std::size_t>(need, 1);
    // any optimal window starts and ends on a transaction day
    DayRange best{days.front(), days.back()};
    for (std::size_t i = 0; i + k <= n; ++i) {
        const DayRange cand{days[i], days[i + k - 1]};
        if (cand.size() < best.size() || (cand.size() == best.size() && cand.first < best.first)) best = cand;
    }
    return best;
}

std::span<const txclass::TypedTx> SchemeDataset::on_day(std::size_t offset) const {
    if (offset >= day_count()) throw InvariantError("day offset outside the analysis window");
    return std::span<const txclass::TypedTx>(txs_).subspan(day_begin_[offset], day_begin_[offset + 1] - day_begin_[offset]);
}

SchemeDataset build_dataset(const std::vector<TxRecord>& transactions, std::vector<MemberRecord> roster,
                            WalletDirectory wallets, PriceTable prices, WindowSpec window, txclass::CleanMode mode,
                            BuildReport* report) {
    if (roster.empty()) throw InputError("roster is empty");
    if (window.mode == WindowSpec::Mode::explicit_range && window.range.last < window.range.first)
        throw InputError("day range " + window.range.str() + " is reversed");

    SchemeDataset ds;
    ds.roster_ = Roster(std::move(roster));
    ds.wallets_ = std::move(wallets);
    ds.prices_ = std::move(prices);

    BuildReport rep;
    auto typed = txclass::clean(txclass::classify_all(transactions, ds.roster_), mode, &rep.cleaning);

    switch (window.mode) {
        case WindowSpec::Mode::explicit_range: ds.window_ = window.range; break;
        case WindowSpec::Mode::all:
        case WindowSpec::Mode::auto_trim: {
            std::vector<Date> days;
            days.reserve(typed.size());
            for (const auto& t : typed) days.push_back(t.day);
            ds.window_ = window.mode == WindowSpec::Mode::all ? trim_window(days, 1.0) : trim_window(days, window.coverage);
            break;
        }
    }

    for (auto& t : typed) {
        if (ds.window_.contains(t.day))
            ds.txs_.push_back(std::move(t));
        else
            ++rep.outside_window;
    }
    ds.day_begin_.assign(ds.day_count() + 1, 0);
    std::size_t idx = 0;
    for (std::size_t d = 0; d < ds.day_count(); ++d) {
        ds.day_begin_[d] = idx;
        while (idx < ds.txs_.size() && ds.txs_[idx].day == ds.day(d)) ++idx;
    }
    ds.day_begin_[ds.day_count()] = idx;
    if (idx != ds.txs_.size()) throw InvariantError("day index does not cover every retained transaction");

    rep.window = ds.window_;
    if (report) *report = rep;
    return ds;
}

}  // namespace ponzi
