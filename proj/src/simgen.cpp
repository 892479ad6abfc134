#include "ponzi/simgen.hpp"

#include "ponzi/address.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_set>

namespace ponzi::simgen {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvariantError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(rng());  // full 64-bit range
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
}

namespace {

std::int64_t leak_units(const SimConfig& c) { return std::llround(c.leak_fraction * 100.0); }

template <class T>
T get_field(const json& j, const char* key, const std::string& source) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(source + ": field '" + key + "' has the wrong type");
    }
}

std::vector<std::pair<std::int64_t, std::int64_t>> plan_bounds(const SimConfig& c) {
    std::vector<std::pair<std::int64_t, std::int64_t>> b;
    std::int64_t starts = c.bootstrap_days;
    for (std::size_t i = 0; i < c.cycles.size(); ++i) {
        const std::int64_t t = c.cycles[i].peak_day;
        const std::int64_t ends =
            i + 1 < c.cycles.size() ? (t + c.cycles[i + 1].peak_day) / 2 : t + (t - starts);
        b.emplace_back(starts, ends);
        starts = ends;
    }
    return b;
}

// Log-linear path from `from` (at day a) to `to` (at day b), strictly between
// lo and hi on interior days.
std::int64_t log_interp(std::int64_t from, std::int64_t to, std::int64_t a, std::int64_t b, std::int64_t d,
                        std::int64_t lo, std::int64_t hi) {
    const double frac = static_cast<double>(d - a) / static_cast<double>(b - a);
    const double v = static_cast<double>(from) * std::pow(static_cast<double>(to) / static_cast<double>(from), frac);
    return std::clamp<std::int64_t>(std::llround(v), lo, hi);
}

std::string random_hex(std::mt19937_64& rng, int words) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (int w = 0; w < words; ++w) {
        std::uint64_t x = rng();
        for (int i = 0; i < 16; ++i) {
            out.push_back(digits[x >> 60]);
            x <<= 4;
        }
    }
    return out;
}

std::string random_address(std::mt19937_64& rng, std::uint8_t version) {
    std::array<std::uint8_t, 20> payload{};
    for (std::size_t i = 0; i < payload.size(); i += 8) {
        std::uint64_t x = rng();
        for (std::size_t k = 0; k < 8 && i + k < payload.size(); ++k) payload[i + k] = static_cast<std::uint8_t>(x >> (8 * k));
    }
    return base58check_encode(version, payload);
}

}  // namespace

SimConfig SimConfig::from_json(std::string_view text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(source + ": " + e.what());
    }
    if (!j.is_object()) throw InputError(source + ": config must be a JSON object");
    static const std::set<std::string> known = {
        "seed",         "members",        "scammers",  "days",       "bootstrap_days", "cycles",
        "collapse_decay", "leak_fraction", "fee_sat",   "countries",  "deposit_rate",   "withdrawal_rate",
        "start_date",   "price_usd",      "unit_min_sat", "unit_max_sat"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw InputError(source + ": unknown config key '" + k + "'");

    SimConfig c;
    if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", source);
    if (j.contains("members")) c.members = get_field<std::int64_t>(j, "members", source);
    if (j.contains("scammers")) c.scammers = get_field<std::int64_t>(j, "scammers", source);
    if (j.contains("days")) c.days = get_field<std::int64_t>(j, "days", source);
    if (j.contains("bootstrap_days")) c.bootstrap_days = get_field<std::int64_t>(j, "bootstrap_days", source);
    if (j.contains("collapse_decay")) c.collapse_decay = get_field<double>(j, "collapse_decay", source);
    if (j.contains("leak_fraction")) c.leak_fraction = get_field<double>(j, "leak_fraction", source);
    if (j.contains("fee_sat")) c.fee_sat = get_field<std::int64_t>(j, "fee_sat", source);
    if (j.contains("deposit_rate")) c.deposit_rate = get_field<double>(j, "deposit_rate", source);
    if (j.contains("withdrawal_rate")) c.withdrawal_rate = get_field<double>(j, "withdrawal_rate", source);
    if (j.contains("unit_min_sat")) c.unit_min_sat = get_field<std::int64_t>(j, "unit_min_sat", source);
    if (j.contains("unit_max_sat")) c.unit_max_sat = get_field<std::int64_t>(j, "unit_max_sat", source);
    try {
        if (j.contains("start_date")) c.start_date = Date::parse(get_field<std::string>(j, "start_date", source));
        if (j.contains("price_usd")) {
            const auto& p = j["price_usd"];
            c.price = UsdPerBtc::parse(p.is_string() ? p.get<std::string>() : p.dump());
        }
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
    if (j.contains("cycles")) {
        if (!j["cycles"].is_array()) throw InputError(source + ": 'cycles' must be an array");
        c.cycles.clear();
        for (const auto& cy : j["cycles"]) {
            if (!cy.is_object() || !cy.contains("peak_day") || !cy.contains("peak_dtv"))
                throw InputError(source + ": each cycle needs peak_day and peak_dtv");
            c.cycles.push_back({get_field<std::int64_t>(cy, "peak_day", source), get_field<std::int64_t>(cy, "peak_dtv", source)});
        }
    }
    if (j.contains("countries")) {
        if (!j["countries"].is_object()) throw InputError(source + ": 'countries' must map country codes to weights");
        c.countries.clear();
        for (const auto& [code, w] : j["countries"].items()) {
            if (!w.is_number_integer()) throw InputError(source + ": weight of " + code + " must be an integer");
            c.countries[code] = w.get<std::int64_t>();
        }
    }
    return c;
}

std::string SimConfig::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["members"] = members;
    j["scammers"] = scammers;
    j["days"] = days;
    j["bootstrap_days"] = bootstrap_days;
    j["cycles"] = ordered_json::array();
    for (const auto& c : cycles) j["cycles"].push_back({{"peak_day", c.peak_day}, {"peak_dtv", c.peak_dtv}});
    j["collapse_decay"] = collapse_decay;
    j["leak_fraction"] = leak_fraction;
    j["fee_sat"] = fee_sat;
    j["countries"] = ordered_json::object();
    for (const auto& [k, w] : countries) j["countries"][k] = w;
    j["deposit_rate"] = deposit_rate;
    j["withdrawal_rate"] = withdrawal_rate;
    j["start_date"] = start_date.str();
    j["price_usd"] = price.str();
    j["unit_min_sat"] = unit_min_sat;
    j["unit_max_sat"] = unit_max_sat;
    return j.dump(2) + "\n";
}

void SimConfig::validate() const {
    auto fail = [](const std::string& msg) { throw InputError("simulation config: " + msg); };
    if (scammers < 1) fail("scammers must be at least 1");
    if (members <= scammers) fail("members must exceed scammers");
    if (days < 3) fail("days must be at least 3");
    if (bootstrap_days < 1) fail("bootstrap_days must be at least 1");
    if (cycles.empty()) fail("at least one cycle is required");
    if (!(collapse_decay > 0.0 && collapse_decay < 1.0)) fail("collapse_decay must lie in (0, 1)");
    if (!(leak_fraction >= 0.0 && leak_fraction < 1.0)) fail("leak_fraction must lie in [0, 1)");
    if (fee_sat < 0 || fee_sat % 100 != 0) fail("fee_sat must be a non-negative multiple of 100");
    if (!(deposit_rate >= 0.0 && deposit_rate <= 1.0)) fail("deposit_rate must lie in [0, 1]");
    if (!(withdrawal_rate >= 0.0)) fail("withdrawal_rate must be non-negative");
    if (unit_min_sat < 1 || unit_max_sat < unit_min_sat) fail("need 1 <= unit_min_sat <= unit_max_sat");
    if (countries.empty()) fail("at least one country is required");
    for (const auto& [code, w] : countries) {
        if (!is_iso_country(code)) fail("'" + code + "' is not an ISO 3166 alpha-2 code");
        if (w <= 0) fail("country weights must be positive");
    }
    if (100 - leak_units(*this) < scammers)
        fail("each ponzi transaction pays every scammer at least 1/100 of its outputs; lower leak_fraction or scammers");

    const std::int64_t p1 = cycles.front().peak_dtv;
    const std::int64_t theta = p1 / 10;
    if (theta < 1) fail("the first peak_dtv must be at least 10");
    std::int64_t prev_day = bootstrap_days;
    std::int64_t prev_dtv = 0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const auto& c = cycles[i];
        if (c.peak_day <= prev_day + (i == 0 ? 0 : 1))
            fail("peak days must increase by at least 2 and follow bootstrap_days");
        if (c.peak_dtv > 20000) fail("peak_dtv above 20000 is not supported");
        if (i > 0 && c.peak_dtv >= prev_dtv) fail("peak_dtv must decrease from one cycle to the next");
        if (c.peak_dtv * 10 <= p1) fail("every peak_dtv must exceed a tenth of the first peak");
        if (c.peak_dtv < theta + 2) fail("peak_dtv too close to the cycle threshold floor(P1/10)");
        prev_day = c.peak_day;
        prev_dtv = c.peak_dtv;
    }
    const auto bounds = plan_bounds(*this);
    if (bounds.back().second >= days) fail("the last cycle must end before the final day");
    for (std::size_t i = 1; i < bounds.size(); ++i) {
        const std::int64_t d_prev = bounds[i - 1].second - bounds[i - 1].first;
        const std::int64_t d = bounds[i].second - bounds[i].first;
        // the detector accepts a later cycle only if d_prev / f <= d < d_prev, f = 10 P_i / P_1
        if (!(d < d_prev) || d * 10 * cycles[i].peak_dtv < d_prev * p1)
            fail("cycle " + std::to_string(i + 1) + " duration " + std::to_string(d) +
                 " is outside the detectable range for previous duration " + std::to_string(d_prev));
    }
}

Envelope envelope(const SimConfig& cfg) {
    cfg.validate();
    Envelope e;
    e.dtv.assign(static_cast<std::size_t>(cfg.days), 0);
    e.theta = cfg.cycles.front().peak_dtv / 10;
    e.cycle_bounds = plan_bounds(cfg);
    e.hyper_start = e.cycle_bounds.front().first;
    e.hyper_end = e.cycle_bounds.back().second;
    const std::int64_t th = e.theta;
    const std::int64_t b = cfg.bootstrap_days;

    for (std::int64_t d = 0; d < b; ++d) e.dtv[d] = std::max<std::int64_t>(1, th * (d + 1) / (b + 1));
    for (std::size_t i = 0; i < cfg.cycles.size(); ++i) {
        const auto [s, en] = e.cycle_bounds[i];
        const std::int64_t t = cfg.cycles[i].peak_day;
        const std::int64_t p = cfg.cycles[i].peak_dtv;
        e.dtv[s] = th;
        for (std::int64_t d = s + 1; d < t; ++d) e.dtv[d] = log_interp(th, p, s, t, d, th + 1, p - 1);
        e.dtv[t] = p;
        for (std::int64_t d = t + 1; d < en; ++d) e.dtv[d] = log_interp(p, th, t, en, d, th + 1, p - 1);
        e.dtv[en] = th;
    }
    double level = static_cast<double>(th);
    for (std::int64_t d = e.hyper_end + 1; d < cfg.days; ++d) {
        level *= cfg.collapse_decay;
        e.dtv[d] = static_cast<std::int64_t>(std::floor(level));
    }
    return e;
}

SimOutput generate(const SimConfig& cfg) {
    const Envelope env = envelope(cfg);
    std::mt19937_64 rng(cfg.seed);
    SimOutput out;
    GroundTruth& gt = out.truth;

    // -- participants --------------------------------------------------------
    std::unordered_set<std::string> used_addresses;
    auto fresh_address = [&](std::uint8_t version) {
        std::string a;
        do a = random_address(rng, version);
        while (!used_addresses.insert(a).second);
        return a;
    };
    std::vector<std::string> country_codes;
    std::vector<std::int64_t> country_cum;
    std::int64_t weight_total = 0;
    for (const auto& [code, w] : cfg.countries) {
        weight_total += w;
        country_codes.push_back(code);
        country_cum.push_back(weight_total);
    }
    auto pick_country = [&] {
        const std::int64_t r = uniform_int(rng, 0, weight_total - 1);
        return country_codes[static_cast<std::size_t>(std::upper_bound(country_cum.begin(), country_cum.end(), r) - country_cum.begin())];
    };

    std::vector<MemberRecord> members;
    for (std::int64_t i = 0; i < cfg.members; ++i) {
        MemberRecord m;
        m.address = fresh_address(0x00);
        char id[32];
        std::snprintf(id, sizeof id, "M%05lld", static_cast<long long>(i + 1));
        m.member_id = id;
        m.country = pick_country();
        m.registration_date = cfg.start_date - static_cast<std::int32_t>(uniform_int(rng, 0, 60));
        m.age = static_cast<int>(uniform_int(rng, 18, 70));
        m.gender = static_cast<Gender>(uniform_int(rng, 0, 2));
        members.push_back(std::move(m));
    }
    // partial Fisher-Yates: the first `scammers` slots become the scammers
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.scammers); ++i)
        std::swap(order[i], order[i + static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(order.size() - i - 1)))]);
    std::vector<const MemberRecord*> scammers, others;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < static_cast<std::size_t>(cfg.scammers) ? scammers : others).push_back(&members[order[i]]);
    std::sort(scammers.begin(), scammers.end(), [](auto* a, auto* b) { return a->address < b->address; });
    for (auto* s : scammers) gt.scammers.push_back(s->address);

    // external counterparties: 5 exchange wallets of 4 addresses, one gambling
    // wallet of 4, and 6 unlisted addresses that also receive the leaks
    std::vector<std::string> externals, unlisted;
    for (int w = 0; w < 6; ++w) {
        char wid[16];
        std::snprintf(wid, sizeof wid, w < 5 ? "ex-%02d" : "gm-%02d", w < 5 ? w + 1 : 1);
        for (int k = 0; k < 4; ++k) {
            const std::string a = fresh_address(k % 2 ? 0x05 : 0x00);
            out.wallets.push_back({a, wid, w < 5 ? WalletCategory::exchanges : WalletCategory::gambling});
            externals.push_back(a);
        }
    }
    for (int k = 0; k < 6; ++k) {
        const std::string a = fresh_address(0x00);
        externals.push_back(a);
        unlisted.push_back(a);
    }
    std::sort(out.wallets.begin(), out.wallets.end(), [](const WalletEntry& a, const WalletEntry& b) { return a.address < b.address; });
    auto pick = [&](const auto& v) -> const auto& { return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(v.size()) - 1))]; };

    // -- transactions ------------------------------------------------------
    std::unordered_set<std::string> txids;
    auto new_txid = [&] {
        std::string id;
        do id = random_hex(rng, 4);
        while (!txids.insert(id).second);
        return id;
    };
    const std::int64_t leak_u = leak_units(cfg);
    const std::int64_t nscam = cfg.scammers;
    const Satoshi fee = cfg.fee_sat;
    gt.origin = cfg.start_date;
    gt.bootstrap_end = env.hyper_start - 1;
    gt.hyper_start = env.hyper_start;
    gt.hyper_end = env.hyper_end;
    for (const auto& c : cfg.cycles) gt.peak_days.push_back(c.peak_day);
    gt.per_day_dtv = env.dtv;
    gt.per_day_dnd_sat.assign(env.dtv.size(), 0);

    std::map<Date, UsdPerBtc> prices;
    for (std::int64_t d = 0; d < cfg.days; ++d) {
        const Date day = cfg.start_date + static_cast<std::int32_t>(d);
        prices[day] = cfg.price;
        const std::int64_t v = env.dtv[static_cast<std::size_t>(d)];
        if (v == 0) continue;
        const std::int64_t p = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(static_cast<double>(v) / (1.0 + cfg.deposit_rate + cfg.withdrawal_rate))));
        const std::int64_t dep = std::min<std::int64_t>(v - p, static_cast<std::int64_t>(std::floor(static_cast<double>(p) * cfg.deposit_rate)));
        const std::int64_t wd = v - p - dep;
        const std::int64_t midnight = static_cast<std::int64_t>(day.days) * 86400;

        std::vector<const MemberRecord*> senders;
        std::vector<Satoshi> sent;
        for (std::int64_t i = 0; i < p; ++i) {
            const MemberRecord* s = pick(others);
            const Satoshi u = uniform_int(rng, cfg.unit_min_sat, cfg.unit_max_sat);
            const Satoshi x = 100 * u + fee;
            std::vector<std::int64_t> units(static_cast<std::size_t>(nscam), 1);
            for (std::int64_t k = 0; k < 100 - leak_u - nscam; ++k) ++units[static_cast<std::size_t>(uniform_int(rng, 0, nscam - 1))];

            TxRecord t;
            t.txid = new_txid();
            t.time = Timestamp{midnight + 8 * 3600 + i};
            t.inputs.push_back({s->address, x});
            for (std::int64_t j = 0; j < nscam; ++j) {
                const auto* r = scammers[static_cast<std::size_t>(j)];
                const std::int64_t n = units[static_cast<std::size_t>(j)];
                t.outputs.push_back({r->address, n * u});
                gt.geo_totals[{s->country, r->country}] += n * (u + fee / 100);
            }
            if (leak_u > 0) t.outputs.push_back({pick(unlisted), leak_u * u});
            gt.total_leak_sat += leak_u * u;
            gt.total_fee_sat += fee;
            gt.per_day_dnd_sat[static_cast<std::size_t>(d)] -= leak_u * u + fee;
            ++gt.ponzi;
            out.transactions.push_back(std::move(t));
            senders.push_back(s);
            sent.push_back(x);
        }
        for (std::int64_t i = 0; i < dep; ++i) {
            TxRecord t;
            t.txid = new_txid();
            t.time = Timestamp{midnight + 1 * 3600 + i};
            t.inputs.push_back({pick(externals), sent[static_cast<std::size_t>(i)] + fee});
            t.outputs.push_back({senders[static_cast<std::size_t>(i)]->address, sent[static_cast<std::size_t>(i)]});
            ++gt.deposits;
            out.transactions.push_back(std::move(t));
        }
        for (std::int64_t i = 0; i < wd; ++i) {
            const auto* s = pick(scammers);
            const Satoshi y = 100 * uniform_int(rng, cfg.unit_min_sat, cfg.unit_max_sat);
            TxRecord t;
            t.txid = new_txid();
            t.time = Timestamp{midnight + 16 * 3600 + i};
            t.inputs.push_back({s->address, y + fee});
            t.outputs.push_back({pick(externals), y});
            ++gt.withdrawals;
            out.transactions.push_back(std::move(t));
        }
        gt.total_dnd_usd += sat_to_usd(gt.per_day_dnd_sat[static_cast<std::size_t>(d)], cfg.price);
    }
    std::sort(out.transactions.begin(), out.transactions.end(), tx_before);
    std::sort(members.begin(), members.end(), [](const MemberRecord& a, const MemberRecord& b) { return a.address < b.address; });
    out.roster = std::move(members);
    out.prices = PriceTable(std::move(prices));
    return out;
}

std::string GroundTruth::to_json(const SimConfig& cfg) const {
    auto date = [&](std::int64_t off) { return (origin + static_cast<std::int32_t>(off)).str(); };
    ordered_json j;
    j["prng"] = kPrngId;
    j["seed"] = cfg.seed;
    j["origin"] = origin.str();
    j["phase_bounds"] = {{"bootstrap_end", date(bootstrap_end)},
                         {"hyper_start", date(hyper_start)},
                         {"hyper_end", date(hyper_end)},
                         {"bootstrap_end_day", bootstrap_end},
                         {"hyper_start_day", hyper_start},
                         {"hyper_end_day", hyper_end}};
    j["peak_days"] = ordered_json::array();
    for (auto d : peak_days) j["peak_days"].push_back(date(d));
    j["scammer_addresses"] = scammers;
    j["counts"] = {{"deposits", deposits}, {"ponzi", ponzi}, {"withdrawals", withdrawals}};
    j["total_leak_sat"] = total_leak_sat;
    j["total_fee_sat"] = total_fee_sat;
    j["total_dnd_usd"] = total_dnd_usd.str();
    j["per_day_dtv"] = per_day_dtv;
    j["per_day_dnd_sat"] = per_day_dnd_sat;
    j["geo_totals"] = ordered_json::array();
    for (const auto& [k, sat] : geo_totals) j["geo_totals"].push_back({{"from", k.first}, {"to", k.second}, {"sat", sat}});
    return j.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> dataset_files(const SimOutput& out, const SimConfig& cfg) {
    return {{"transactions.ndjson", to_ndjson(out.transactions)},
            {"roster.csv", roster_csv(out.roster)},
            {"wallets.csv", wallets_csv(out.wallets)},
            {"prices.csv", prices_csv(out.prices)},
            {"groundtruth.json", out.truth.to_json(cfg)}};
}

}  // namespace ponzi::simgen
