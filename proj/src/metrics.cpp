#include "ponzi/metrics.hpp"

#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

namespace ponzi::metrics {

using txclass::TxKind;
using txclass::TypedTx;

namespace {

std::string fmt_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Converts only when there is something to convert, so days without
// activity never require a price.
UsdCents usd(const SchemeDataset& ds, Satoshi sat, Date day) {
    if (sat == 0) return {};
    return ds.prices().to_usd(sat, day);
}

std::string opt_cell(const std::optional<UsdCents>& v) { return v ? v->str() : ""; }

}  // namespace

std::size_t dtv(const SchemeDataset& ds, Date day) { return ds.on_day(day).size(); }

Satoshi dmf_contribution(const TypedTx& t) {
    return t.kind == TxKind::withdrawal ? t.ponzi_inputs : t.ponzi_outputs;
}

UsdCents dmf(const SchemeDataset& ds, Date day, AggregateKind f) {
    const auto txs = ds.on_day(day);
    if (txs.empty()) return {};
    Satoshi sum = 0, mx = 0;
    for (const auto& t : txs) {
        const Satoshi c = dmf_contribution(t);
        sum += c;
        mx = std::max(mx, c);
    }
    const auto price = ds.prices().at(day);
    switch (f) {
        case AggregateKind::sum: return sat_to_usd(sum, price);
        case AggregateKind::max: return sat_to_usd(mx, price);
        case AggregateKind::mean: return sat_ratio_to_usd(sum, static_cast<__int128>(txs.size()), price);
    }
    return {};
}

std::optional<UsdCents> dfr(const SchemeDataset& ds, Date day) {
    const auto n = dtv(ds, day);
    if (n == 0) return std::nullopt;
    return UsdCents{round_half_even(dmf(ds, day, AggregateKind::sum).cents, static_cast<__int128>(n))};
}

std::map<std::string, AddressFlow> address_flows(const SchemeDataset& ds, Date day) {
    std::map<std::string, AddressFlow> out;
    for (const auto& t : ds.on_day(day)) {
        if (t.kind != TxKind::ponzi) continue;
        for (const auto& io : t.tx.inputs)
            if (ds.roster().contains(io.addr)) out[io.addr].dns += io.value;
        for (const auto& io : t.tx.outputs)
            if (ds.roster().contains(io.addr)) out[io.addr].dni += io.value;
        std::vector<std::string> involved = t.roster_inputs;
        involved.insert(involved.end(), t.roster_outputs.begin(), t.roster_outputs.end());
        std::sort(involved.begin(), involved.end());
        involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
        for (const auto& a : involved) ++out[a].ponzi_txs;
    }
    return out;
}

Satoshi dni(const SchemeDataset& ds, std::string_view addr, Date day) {
    const auto flows = address_flows(ds, day);
    const auto it = flows.find(std::string(addr));
    return it == flows.end() ? 0 : it->second.dni;
}

Satoshi dns(const SchemeDataset& ds, std::string_view addr, Date day) {
    const auto flows = address_flows(ds, day);
    const auto it = flows.find(std::string(addr));
    return it == flows.end() ? 0 : it->second.dns;
}

Satoshi dnw(const SchemeDataset& ds, std::string_view addr, Date day) { return dni(ds, addr, day) - dns(ds, addr, day); }

std::optional<GiniRatio> gini(std::span<const Satoshi> values) {
    if (values.empty()) return std::nullopt;
    std::vector<Satoshi> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    const auto n = static_cast<__int128>(x.size());
    __int128 total = 0, weighted = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0) throw InvariantError("gini: negative income");
        total += x[i];
        // each x_(i) is larger than i values and smaller than n-1-i values
        weighted += (2 * static_cast<__int128>(i) - n + 1) * x[i];
    }
    if (total == 0) return GiniRatio{0, 1};
    return GiniRatio{2 * weighted, 2 * n * total};
}

std::optional<double> dgi(const SchemeDataset& ds, Date day, GiniPopulation pop) {
    const auto flows = address_flows(ds, day);
    std::vector<Satoshi> incomes;
    for (const auto& [addr, f] : flows) incomes.push_back(f.dni);
    if (pop == GiniPopulation::all_roster) incomes.resize(ds.roster().size(), 0);
    if (incomes.empty()) return std::nullopt;
    return gini(incomes)->value();
}

Satoshi dnd_sat(const SchemeDataset& ds, Date day) {
    Satoshi s = 0;
    for (const auto& [addr, f] : address_flows(ds, day)) s += f.dnw();
    return s;
}

UsdCents dnd(const SchemeDataset& ds, Date day) { return usd(ds, dnd_sat(ds, day), day); }

UsdCents total_dnd(const SchemeDataset& ds, DayRange days) {
    UsdCents total;
    for (Date d = days.first; d <= days.last; d = d + 1) total += dnd(ds, d);
    return total;
}

UsdCents total_abs_dnd(const SchemeDataset& ds, DayRange days) {
    UsdCents total;
    for (Date d = days.first; d <= days.last; d = d + 1) total += abs(dnd(ds, d));
    return total;
}

std::vector<DayMetrics> daily_metrics(const SchemeDataset& ds, DailyOptions opts) {
    std::vector<DayMetrics> rows;
    rows.reserve(ds.day_count());
    for (std::size_t i = 0; i < ds.day_count(); ++i) {
        const Date day = ds.day(i);
        DayMetrics m;
        m.day = day;
        const auto txs = ds.on_day(i);
        m.dtv = txs.size();
        for (const auto& t : txs) {
            m.dmf_sum_sat += dmf_contribution(t);
            if (t.kind == TxKind::ponzi) m.ponzi_input_sat += t.ponzi_inputs;
        }
        if (m.dtv > 0) {
            m.dmf_sum = dmf(ds, day, AggregateKind::sum);
            m.dmf_mean = dmf(ds, day, AggregateKind::mean);
            m.dmf_max = dmf(ds, day, AggregateKind::max);
            m.dfr = dfr(ds, day);
        }
        m.dgi = dgi(ds, day, opts.gini_population);
        m.dnd_sat = dnd_sat(ds, day);
        m.dnd = usd(ds, m.dnd_sat, day);
        rows.push_back(m);
    }
    return rows;
}

std::string daily_csv(const std::vector<DayMetrics>& rows) {
    std::string out = "day,dtv,dmf_sum,dmf_mean,dmf_max,dfr,dgi,dnd,dmf_sum_sat,dnd_sat,ponzi_input_sat\n";
    for (const auto& m : rows)
        csv::append_row(out, {m.day.str(), std::to_string(m.dtv), m.dmf_sum.str(), m.dmf_mean.str(), m.dmf_max.str(),
                              opt_cell(m.dfr), m.dgi ? fmt_double(*m.dgi, 6) : "", m.dnd.str(),
                              std::to_string(m.dmf_sum_sat), std::to_string(m.dnd_sat),
                              std::to_string(m.ponzi_input_sat)});
    return out;
}

std::string daily_json(const std::vector<DayMetrics>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : rows) {
        nlohmann::ordered_json j;
        j["day"] = m.day.str();
        j["dtv"] = m.dtv;
        j["dmf_sum_usd"] = m.dmf_sum.str();
        j["dmf_mean_usd"] = m.dmf_mean.str();
        j["dmf_max_usd"] = m.dmf_max.str();
        j["dfr_usd"] = m.dfr ? nlohmann::ordered_json(m.dfr->str()) : nlohmann::ordered_json(nullptr);
        j["dgi"] = m.dgi ? nlohmann::ordered_json(fmt_double(*m.dgi, 6)) : nlohmann::ordered_json(nullptr);
        j["dnd_usd"] = m.dnd.str();
        j["dmf_sum_sat"] = m.dmf_sum_sat;
        j["dnd_sat"] = m.dnd_sat;
        j["ponzi_input_sat"] = m.ponzi_input_sat;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

// ---- NetWorthLedger ----------------------------------------------------

NetWorthLedger::NetWorthLedger(const SchemeDataset& ds, DayRange span, CvrDenominator cvr_mode) : span_(span) {
    if (span.last < span.first) throw InputError("ledger span " + span.str() + " is reversed");
    if (!ds.window().contains(span.first) || !ds.window().contains(span.last))
        throw InputError("ledger span " + span.str() + " lies outside the dataset window " + ds.window().str());

    struct State {
        Satoshi tnw = 0;
        std::int64_t count = 0;
        UsdCents usd;
    };
    std::map<std::string, State> state;
    std::size_t victims = 0;

    for (Date d = span.first; d <= span.last; d = d + 1) {
        for (const auto& [addr, f] : address_flows(ds, d)) {
            auto [it, fresh] = state.try_emplace(addr);
            State& s = it->second;
            if (!fresh && s.tnw < 0) --victims;
            s.tnw += f.dnw();
            s.count += static_cast<std::int64_t>(f.ponzi_txs);
            s.usd += usd(ds, f.dnw(), d);
            if (s.tnw < 0) ++victims;
            entries_.push_back({addr, d, f.dni, f.dns, f.dnw(), s.count, s.tnw, s.usd});
        }
        CvrPoint p;
        p.day = d;
        p.active = cvr_mode == CvrDenominator::active ? state.size() : ds.roster().size();
        p.victims = victims;
        if (p.active > 0) p.cvr = static_cast<double>(victims) / static_cast<double>(p.active);
        cvr_.push_back(p);
    }

    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const LedgerEntry& a, const LedgerEntry& b) { return a.address < b.address; });
    for (std::size_t i = 0; i < entries_.size();) {
        std::size_t j = i;
        while (j < entries_.size() && entries_[j].address == entries_[i].address) ++j;
        by_address_.emplace(entries_[i].address, std::make_pair(i, j));
        i = j;
    }
}

const LedgerEntry* NetWorthLedger::last_entry(std::string_view addr, Date day) const {
    const auto it = by_address_.find(addr);
    if (it == by_address_.end()) return nullptr;
    const auto begin = entries_.begin() + static_cast<std::ptrdiff_t>(it->second.first);
    const auto end = entries_.begin() + static_cast<std::ptrdiff_t>(it->second.second);
    auto pos = std::upper_bound(begin, end, day, [](Date d, const LedgerEntry& e) { return d < e.day; });
    if (pos == begin) return nullptr;
    return &*(pos - 1);
}

Satoshi NetWorthLedger::tnw(std::string_view addr, Date day) const {
    const auto* e = last_entry(addr, day);
    return e ? e->tnw_cum : 0;
}

UsdCents NetWorthLedger::tnw_usd(std::string_view addr, Date day) const {
    const auto* e = last_entry(addr, day);
    return e ? e->tnw_usd_cum : UsdCents{};
}

std::int64_t NetWorthLedger::ponzi_tx_count(std::string_view addr, Date day) const {
    const auto* e = last_entry(addr, day);
    return e ? e->ponzi_tx_count_cum : 0;
}

std::optional<NormalizedWorth> NetWorthLedger::tnw_norm(std::string_view addr, Date day) const {
    const auto* e = last_entry(addr, day);
    if (!e || e->ponzi_tx_count_cum == 0) return std::nullopt;
    return NormalizedWorth{e->tnw_cum, e->ponzi_tx_count_cum};
}

std::vector<std::pair<std::string, NormalizedWorth>> NetWorthLedger::standings(Date day) const {
    std::vector<std::pair<std::string, NormalizedWorth>> out;
    for (const auto& [addr, range] : by_address_)
        if (auto n = tnw_norm(addr, day)) out.emplace_back(addr, *n);
    return out;
}

std::optional<double> NetWorthLedger::cvr(Date day) const {
    if (!span_.contains(day)) throw InputError("CVR requested for " + day.str() + " outside " + span_.str());
    return cvr_[static_cast<std::size_t>(day - span_.first)].cvr;
}

std::string NetWorthLedger::csv() const {
    std::string out = "address,day,dni,dns,dnw,tnw,tnw_norm,ponzi_tx_count\n";
    for (const auto& e : entries_) {
        const std::string norm = e.ponzi_tx_count_cum == 0
                                     ? ""
                                     : format_hundredths(round_half_even(static_cast<__int128>(e.tnw_cum) * 100,
                                                                         e.ponzi_tx_count_cum));
        csv::append_row(out, {e.address, e.day.str(), std::to_string(e.dni), std::to_string(e.dns),
                              std::to_string(e.dnw), std::to_string(e.tnw_cum), norm,
                              std::to_string(e.ponzi_tx_count_cum)});
    }
    return out;
}

}  // namespace ponzi::metrics
