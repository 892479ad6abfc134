#include "ponzi/flows.hpp"

#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ponzi::flows {

using txclass::TxKind;
using txclass::TypedTx;

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt6(*v) : ""; }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(fmt6(*v)) : nlohmann::ordered_json(nullptr);
}

// Counterparty addresses with their values for a deposit or withdrawal.
std::vector<const TxIO*> counterparties(const TypedTx& t, const Roster& roster) {
    std::vector<const TxIO*> out;
    if (t.kind == TxKind::deposit) {
        for (const auto& io : t.tx.inputs) out.push_back(&io);
    } else if (t.kind == TxKind::withdrawal) {
        for (const auto& io : t.tx.outputs)
            if (!roster.contains(io.addr)) out.push_back(&io);
    } else {
        throw InvariantError("categorize_tx called on ponzi transaction " + t.tx.txid);
    }
    return out;
}

std::string member_key(const MemberRecord& m) { return m.member_id.empty() ? m.address : m.member_id; }

}  // namespace

std::set<WalletCategory> categorize_tx(const TypedTx& t, const WalletDirectory& wallets, const Roster& roster) {
    std::set<WalletCategory> cats;
    for (const TxIO* io : counterparties(t, roster)) cats.insert(wallets.category(io->addr));
    return cats;
}

std::vector<CategoryShare> external_shares(const SchemeDataset& ds, ShareMode mode) {
    // index 0 = deposits, 1 = withdrawals
    std::array<std::array<__int128, kWalletCategoryCount>, 2> weight{};
    std::array<__int128, 2> total{};
    std::array<std::size_t, 2> txs{};

    for (const auto& t : ds.transactions()) {
        if (t.kind == TxKind::ponzi) continue;
        const int dir = t.kind == TxKind::deposit ? 0 : 1;
        ++txs[dir];
        if (mode == ShareMode::incidence) {
            for (WalletCategory c : categorize_tx(t, ds.wallets(), ds.roster())) {
                ++weight[dir][static_cast<std::size_t>(c)];
                ++total[dir];
            }
        } else {
            for (const TxIO* io : counterparties(t, ds.roster())) {
                weight[dir][static_cast<std::size_t>(ds.wallets().category(io->addr))] += io->value;
                total[dir] += io->value;
            }
        }
    }

    std::vector<CategoryShare> out;
    for (std::size_t c = 0; c < kWalletCategoryCount; ++c) {
        CategoryShare s{static_cast<WalletCategory>(c), std::nullopt, std::nullopt};
        auto share = [&](int dir) -> std::optional<double> {
            if (txs[dir] == 0) return std::nullopt;
            if (total[dir] == 0) return 0.0;
            return static_cast<double>(static_cast<long double>(weight[dir][c]) / static_cast<long double>(total[dir]));
        };
        s.deposit_share = share(0);
        s.withdrawal_share = share(1);
        out.push_back(s);
    }
    return out;
}

std::string shares_csv(const std::vector<CategoryShare>& shares) {
    std::string out = "category,deposit_share,withdrawal_share\n";
    for (const auto& s : shares)
        csv::append_row(out, {std::string(to_string(s.category)), opt_fmt(s.deposit_share), opt_fmt(s.withdrawal_share)});
    return out;
}

std::string shares_json(const std::vector<CategoryShare>& shares) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : shares)
        arr.push_back({{"category", to_string(s.category)},
                       {"deposit_share", opt_json(s.deposit_share)},
                       {"withdrawal_share", opt_json(s.withdrawal_share)}});
    return arr.dump(2) + "\n";
}

std::vector<GeoFlow> attribute_geo(const TypedTx& t, const Roster& roster) {
    const __int128 total_out = t.tx.output_total();
    if (total_out == 0) return {};

    std::map<std::string, __int128> in_by_country, out_by_country;
    for (const auto& io : t.tx.inputs)
        if (const auto* m = roster.find(io.addr); m && !m->country.empty()) in_by_country[m->country] += io.value;
    for (const auto& io : t.tx.outputs)
        if (const auto* m = roster.find(io.addr); m && !m->country.empty()) out_by_country[m->country] += io.value;

    struct Part {
        GeoFlow flow;
        __int128 rem;
    };
    std::vector<Part> parts;
    __int128 exact_num = 0;
    Satoshi floors = 0;
    for (const auto& [from, vin] : in_by_country) {
        for (const auto& [to, vout] : out_by_country) {
            const __int128 num = vin * vout;
            exact_num += num;
            const auto q = static_cast<Satoshi>(num / total_out);
            floors += q;
            parts.push_back({{from, to, q}, num % total_out});
        }
    }
    auto extra = static_cast<Satoshi>(exact_num / total_out) - floors;
    if (extra > 0) {
        std::vector<std::size_t> order(parts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return parts[a].rem > parts[b].rem; });
        for (std::size_t i = 0; i < order.size() && extra > 0; ++i, --extra) ++parts[order[i]].flow.sat;
    }

    std::vector<GeoFlow> out;
    for (auto& p : parts)
        if (p.flow.sat > 0) out.push_back(std::move(p.flow));
    return out;
}

const GeoEdge* GeoNetwork::edge(std::string_view from, std::string_view to) const {
    for (const auto& e : edges)
        if (e.from == from && e.to == to) return &e;
    return nullptr;
}

std::size_t GeoNetwork::inter_country_edges() const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const GeoEdge& e) { return !e.self_loop(); }));
}

GeoNetwork build_geo_network(const SchemeDataset& ds) {
    std::map<std::string, std::set<std::string>> members;
    std::map<std::pair<std::string, std::string>, GeoEdge> edges;

    for (const auto& t : ds.transactions()) {
        if (t.kind != TxKind::ponzi) continue;
        for (const auto* side : {&t.roster_inputs, &t.roster_outputs})
            for (const auto& addr : *side)
                if (const auto* m = ds.roster().find(addr); m && !m->country.empty())
                    members[m->country].insert(member_key(*m));
        const auto flows = attribute_geo(t, ds.roster());
        if (flows.empty()) continue;
        const UsdPerBtc price = ds.prices().at(t.day);
        for (const auto& f : flows) {
            auto& e = edges[{f.from, f.to}];
            e.from = f.from;
            e.to = f.to;
            e.sat += f.sat;
            e.usd += sat_to_usd(f.sat, price);
        }
    }

    GeoNetwork g;
    for (const auto& [country, ids] : members) g.nodes[country] = ids.size();
    for (auto& [key, e] : edges) {
        if (e.usd.cents <= 0) continue;
        e.member_count_from = g.nodes[e.from];
        e.member_count_to = g.nodes[e.to];
        g.edges.push_back(std::move(e));
    }
    return g;
}

Asymmetry asymmetry(const GeoNetwork& g, std::string_view a, std::string_view b) {
    const GeoEdge* fwd = g.edge(a, b);
    const GeoEdge* bwd = g.edge(b, a);
    if (!fwd && !bwd)
        throw InputError("no flow between " + std::string(a) + " and " + std::string(b) + " in either direction");
    Asymmetry r;
    r.forward = fwd ? fwd->usd : UsdCents{};
    r.backward = bwd ? bwd->usd : UsdCents{};
    if (fwd && bwd) r.ratio = static_cast<double>(r.forward.cents) / static_cast<double>(r.backward.cents);
    return r;
}

std::string geo_dot(const GeoNetwork& g, DotOptions opts) {
    std::string out = "digraph geo {\n";
    for (const auto& [country, n] : g.nodes)
        out += "  \"" + country + "\" [label=\"" + country + " (" + std::to_string(n) + ")\"];\n";
    for (const auto& e : g.edges) {
        if (e.self_loop() && !opts.include_self_loops) continue;
        char pen[32];
        std::snprintf(pen, sizeof pen, "%.3f", 1.0 + std::log10(std::max(1.0, e.usd.dollars())));
        out += "  \"" + e.from + "\" -> \"" + e.to + "\" [usd=\"" + e.usd.str() + "\", penwidth=" + pen + "];\n";
    }
    out += "}\n";
    return out;
}

std::string geo_json(const GeoNetwork& g) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& [country, n] : g.nodes) j["nodes"].push_back({{"country", country}, {"members", n}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"usd", e.usd.str()},
                              {"sat", e.sat},
                              {"member_count_from", e.member_count_from},
                              {"member_count_to", e.member_count_to},
                              {"self_loop", e.self_loop()}});
    return j.dump(2) + "\n";
}

}  // namespace ponzi::flows
