#include "ponzi/classify.hpp"

#include "ponzi/address.hpp"
#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

namespace ponzi::classify {

using metrics::NormalizedWorth;
using txclass::TxKind;

namespace {

std::string month_key(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", d.year(), d.month());
    return buf;
}

// Same day-of-month one calendar month later, clamped to the month's end.
Date add_month(Date d) {
    int y = d.year();
    unsigned m = d.month() + 1;
    if (m == 13) {
        m = 1;
        ++y;
    }
    unsigned day = d.day();
    while (true) {
        try {
            return Date::from_ymd(y, m, day);
        } catch (const InputError&) {
            --day;
        }
    }
}

bool ranks_before(const Ranked& a, const Ranked& b) {
    if (!(a.second == b.second)) return b.second < a.second;
    return a.first < b.first;
}

std::string fmt_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

nlohmann::ordered_json counterparty_json(const std::optional<Counterparty>& c) {
    if (!c) return nullptr;
    return {{"address", c->address}, {"wallet", c->wallet_id}, {"usd", c->usd.str()}, {"txid", c->txid}};
}

}  // namespace

std::string_view to_string(Label l) {
    switch (l) {
        case Label::victim: return "victim";
        case Label::non_victim: return "non_victim";
        case Label::unlabeled: return "unlabeled";
    }
    return "?";
}

Label label(const metrics::NetWorthLedger& ledger, std::string_view addr, Date day) {
    const auto n = ledger.tnw_norm(addr, day);
    if (!n) return Label::unlabeled;
    return n->negative() ? Label::victim : Label::non_victim;
}

std::vector<Ranked> rank_daily(const metrics::NetWorthLedger& ledger, Date day, std::size_t k) {
    auto all = ledger.standings(day);
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    return all;
}

ScammerSearch likely_scammers(const metrics::NetWorthLedger& ledger, ScammerOptions opts) {
    const DayRange span = ledger.span();
    if (add_month(span.first) > span.last)
        throw InputError("hyperoperation " + span.str() + " is shorter than one month");

    ScammerSearch out;
    for (Date d = span.first; d <= span.last; d = d + 1) {
        if (opts.full_months_only) {
            const bool month_starts_inside = Date::from_ymd(d.year(), d.month(), 1) >= span.first;
            const bool month_ends_inside = add_month(Date::from_ymd(d.year(), d.month(), 1)) - 1 <= span.last;
            if (!month_starts_inside || !month_ends_inside) continue;
        }
        auto& month = out.monthly[month_key(d)];
        for (auto& [addr, worth] : rank_daily(ledger, d, opts.top_k)) month.insert(addr);
    }
    if (out.monthly.empty()) throw InputError("hyperoperation " + span.str() + " contains no full calendar month");

    bool first = true;
    for (const auto& [month, members] : out.monthly) {
        if (first) {
            out.scammers = members;
            first = false;
            continue;
        }
        std::set<std::string> next;
        std::set_intersection(out.scammers.begin(), out.scammers.end(), members.begin(), members.end(),
                              std::inserter(next, next.end()));
        out.scammers = std::move(next);
    }
    return out;
}

std::optional<Counterparty> top_deposit_from(const SchemeDataset& ds, std::string_view addr) {
    std::optional<Counterparty> best;
    for (const auto& t : ds.transactions()) {
        if (t.kind != TxKind::deposit) continue;
        Satoshi received = 0;
        for (const auto& io : t.tx.outputs)
            if (io.addr == addr) received += io.value;
        if (received == 0 && !std::binary_search(t.roster_outputs.begin(), t.roster_outputs.end(), addr)) continue;
        const UsdCents usd = ds.prices().to_usd(received, t.day);
        // transactions are visited in (time, txid) order, so strict > keeps the earliest
        if (best && !(usd > best->usd)) continue;
        const TxIO* top = nullptr;
        for (const auto& io : t.tx.inputs)
            if (!top || io.value > top->value || (io.value == top->value && io.addr < top->addr)) top = &io;
        if (!top) continue;
        best = Counterparty{top->addr, ds.wallets().wallet_id(top->addr), usd, t.tx.txid};
    }
    return best;
}

std::optional<Counterparty> top_withdrawal_to(const SchemeDataset& ds, std::string_view addr) {
    std::optional<Counterparty> best;
    for (const auto& t : ds.transactions()) {
        if (t.kind != TxKind::withdrawal) continue;
        if (!std::binary_search(t.roster_inputs.begin(), t.roster_inputs.end(), addr)) continue;
        Satoshi sent = 0;
        for (const auto& io : t.tx.inputs)
            if (io.addr == addr) sent += io.value;
        const UsdCents usd = ds.prices().to_usd(sent, t.day);
        if (best && !(usd > best->usd)) continue;
        const TxIO* top = nullptr;
        for (const auto& io : t.tx.outputs) {
            if (ds.roster().contains(io.addr) || io.addr == kUnparseableAddress) continue;
            if (!top || io.value > top->value || (io.value == top->value && io.addr < top->addr)) top = &io;
        }
        if (!top) continue;
        best = Counterparty{top->addr, ds.wallets().wallet_id(top->addr), usd, t.tx.txid};
    }
    return best;
}

std::vector<ScammerRow> scammer_report(const SchemeDataset& ds, const metrics::NetWorthLedger& ledger,
                                       const std::set<std::string>& addresses) {
    std::vector<ScammerRow> rows;
    const Date last = ledger.span().last;
    for (const auto& addr : addresses) {
        ScammerRow r;
        r.address = addr;
        r.final_tnw = ledger.tnw_usd(addr, last);
        r.final_tnw_sat = ledger.tnw(addr, last);
        if (r.final_tnw.cents <= 0) continue;
        r.wallet_size = ds.wallets().wallet_size(ds.wallets().wallet_id(addr));
        if (const auto* m = ds.roster().find(addr)) r.registration_date = m->registration_date;
        r.top_deposit_from = top_deposit_from(ds, addr);
        r.top_withdrawal_to = top_withdrawal_to(ds, addr);
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const ScammerRow& a, const ScammerRow& b) {
        return a.final_tnw != b.final_tnw ? a.final_tnw > b.final_tnw : a.address < b.address;
    });
    return rows;
}

std::string scammers_csv(const std::vector<ScammerRow>& rows) {
    std::string out =
        "address,final_tnw_usd,final_tnw_sat,wallet_size,registration_date,top_deposit_from_address,"
        "top_deposit_from_wallet,top_deposit_usd,top_withdrawal_to_address,top_withdrawal_to_wallet,"
        "top_withdrawal_usd\n";
    for (const auto& r : rows) {
        const auto& d = r.top_deposit_from;
        const auto& w = r.top_withdrawal_to;
        csv::append_row(out, {r.address, r.final_tnw.str(), std::to_string(r.final_tnw_sat),
                              std::to_string(r.wallet_size), r.registration_date ? r.registration_date->str() : "",
                              d ? d->address : "", d ? d->wallet_id : "", d ? d->usd.str() : "",
                              w ? w->address : "", w ? w->wallet_id : "", w ? w->usd.str() : ""});
    }
    return out;
}

std::string scammers_json(const std::vector<ScammerRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["address"] = r.address;
        j["final_tnw_usd"] = r.final_tnw.str();
        j["final_tnw_sat"] = r.final_tnw_sat;
        j["wallet_size"] = r.wallet_size;
        j["registration_date"] =
            r.registration_date ? nlohmann::ordered_json(r.registration_date->str()) : nlohmann::ordered_json(nullptr);
        j["top_deposit_from"] = counterparty_json(r.top_deposit_from);
        j["top_withdrawal_to"] = counterparty_json(r.top_withdrawal_to);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string victims_csv(const std::vector<metrics::CvrPoint>& series) {
    std::string out = "day,cvr,active_count,victim_count\n";
    for (const auto& p : series)
        csv::append_row(out, {p.day.str(), p.cvr ? fmt_ratio(*p.cvr) : "", std::to_string(p.active),
                              std::to_string(p.victims)});
    return out;
}

std::string victims_json(const std::vector<metrics::CvrPoint>& series) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : series)
        arr.push_back({{"day", p.day.str()},
                       {"cvr", p.cvr ? nlohmann::ordered_json(fmt_ratio(*p.cvr)) : nlohmann::ordered_json(nullptr)},
                       {"active_count", p.active},
                       {"victim_count", p.victims}});
    return arr.dump(2) + "\n";
}

}  // namespace ponzi::classify
