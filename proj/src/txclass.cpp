#include "ponzi/txclass.hpp"

#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_map>

namespace ponzi::txclass {

namespace {

struct TxKey {
    Timestamp time;
    const std::string* txid;
    bool operator<(const TxKey& o) const { return time != o.time ? time < o.time : *txid < *o.txid; }
};

TxKey key_of(const TypedTx& t) { return {t.tx.time, &t.tx.txid}; }

std::vector<std::string> distinct_sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::size_t roster_address_count(const TypedTx& t) {
    std::vector<std::string> all = t.roster_inputs;
    all.insert(all.end(), t.roster_outputs.begin(), t.roster_outputs.end());
    return distinct_sorted(std::move(all)).size();
}

}  // namespace

std::string_view to_string(TxKind kind) {
    switch (kind) {
        case TxKind::deposit: return "deposit";
        case TxKind::ponzi: return "ponzi";
        case TxKind::withdrawal: return "withdrawal";
    }
    return "?";
}

TxKind parse_kind(std::string_view text) {
    if (text == "deposit") return TxKind::deposit;
    if (text == "ponzi") return TxKind::ponzi;
    if (text == "withdrawal") return TxKind::withdrawal;
    throw InputError("unknown transaction kind '" + std::string(text) + "'");
}

std::optional<TypedTx> classify(const TxRecord& tx, const Roster& roster) {
    TypedTx t;
    for (const auto& io : tx.inputs)
        if (roster.contains(io.addr)) {
            t.ponzi_inputs += io.value;
            t.roster_inputs.push_back(io.addr);
        }
    for (const auto& io : tx.outputs)
        if (roster.contains(io.addr)) {
            t.ponzi_outputs += io.value;
            t.roster_outputs.push_back(io.addr);
        }
    const bool in = !t.roster_inputs.empty(), out = !t.roster_outputs.empty();
    if (!in && !out) return std::nullopt;
    t.kind = in && out ? TxKind::ponzi : (out ? TxKind::deposit : TxKind::withdrawal);
    t.roster_inputs = distinct_sorted(std::move(t.roster_inputs));
    t.roster_outputs = distinct_sorted(std::move(t.roster_outputs));
    t.day = tx.time.date();
    t.tx = tx;
    return t;
}

std::vector<TypedTx> classify_all(const std::vector<TxRecord>& txs, const Roster& roster) {
    std::vector<TypedTx> out;
    for (const auto& tx : txs)
        if (auto t = classify(tx, roster)) out.push_back(std::move(*t));
    std::sort(out.begin(), out.end(), [](const TypedTx& a, const TypedTx& b) { return tx_before(a.tx, b.tx); });
    return out;
}

std::vector<TypedTx> clean(const std::vector<TypedTx>& typed, CleanMode mode, CleaningReport* report) {
    CleaningReport r;
    r.input = typed.size();
    for (std::size_t i = 1; i < typed.size(); ++i)
        if (tx_before(typed[i].tx, typed[i - 1].tx))
            throw InvariantError("clean: transactions are not sorted by (time, txid)");

    std::vector<char> keep(typed.size(), 1);
    for (std::size_t i = 0; i < typed.size(); ++i) {
        const auto& t = typed[i];
        if (t.kind == TxKind::deposit && t.tx.coinbase) {
            keep[i] = 0;
            ++r.coinbase_deposits;
        } else if (t.kind == TxKind::ponzi && roster_address_count(t) == 1) {
            keep[i] = 0;
            ++r.single_address_ponzi;
        }
    }

    // first and last ponzi transaction per roster address
    std::unordered_map<std::string, std::pair<TxKey, TxKey>> span;
    for (std::size_t i = 0; i < typed.size(); ++i) {
        const auto& t = typed[i];
        if (t.kind != TxKind::ponzi) continue;
        if (mode == CleanMode::fixpoint && !keep[i]) continue;
        const TxKey k = key_of(t);
        auto touch = [&](const std::string& a) {
            auto [it, fresh] = span.try_emplace(a, k, k);
            if (!fresh) {
                if (k < it->second.first) it->second.first = k;
                if (it->second.second < k) it->second.second = k;
            }
        };
        for (const auto& a : t.roster_inputs) touch(a);
        for (const auto& a : t.roster_outputs) touch(a);
    }

    for (std::size_t i = 0; i < typed.size(); ++i) {
        if (!keep[i]) continue;
        const auto& t = typed[i];
        const TxKey k = key_of(t);
        if (t.kind == TxKind::deposit) {
            const bool followed = std::any_of(t.roster_outputs.begin(), t.roster_outputs.end(), [&](const auto& a) {
                const auto it = span.find(a);
                return it != span.end() && k < it->second.second;
            });
            if (!followed) {
                keep[i] = 0;
                ++r.unfollowed_deposits;
            }
        } else if (t.kind == TxKind::withdrawal) {
            const bool preceded = std::any_of(t.roster_inputs.begin(), t.roster_inputs.end(), [&](const auto& a) {
                const auto it = span.find(a);
                return it != span.end() && it->second.first < k;
            });
            if (!preceded) {
                keep[i] = 0;
                ++r.unpreceded_withdrawals;
            }
        }
    }

    std::vector<TypedTx> out;
    for (std::size_t i = 0; i < typed.size(); ++i) {
        if (!keep[i]) continue;
        switch (typed[i].kind) {
            case TxKind::deposit: ++r.deposits; break;
            case TxKind::ponzi: ++r.ponzi; break;
            case TxKind::withdrawal: ++r.withdrawals; break;
        }
        out.push_back(typed[i]);
    }
    if (report) *report = r;
    return out;
}

Roles roles(const TypedTx& tx, std::string_view addr) {
    Roles r;
    if (tx.kind != TxKind::ponzi) return r;
    r.send = std::binary_search(tx.roster_inputs.begin(), tx.roster_inputs.end(), addr);
    r.receive = std::binary_search(tx.roster_outputs.begin(), tx.roster_outputs.end(), addr);
    return r;
}

std::string CleaningReport::to_json() const {
    nlohmann::ordered_json j;
    j["input_transactions"] = input;
    j["dropped"] = {{"coinbase_deposits", coinbase_deposits},
                    {"single_address_ponzi", single_address_ponzi},
                    {"unfollowed_deposits", unfollowed_deposits},
                    {"unpreceded_withdrawals", unpreceded_withdrawals}};
    j["retained"] = {{"deposits", deposits}, {"ponzi", ponzi}, {"withdrawals", withdrawals},
                     {"total", deposits + ponzi + withdrawals}};
    return j.dump(2) + "\n";
}

std::string typed_ndjson(const std::vector<TypedTx>& typed) {
    std::string out;
    for (const auto& t : typed) {
        auto j = nlohmann::ordered_json::parse(to_ndjson_line(t.tx));
        j["kind"] = to_string(t.kind);
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

}  // namespace ponzi::txclass
