#include "support.hpp"

#include "ponzi/errors.hpp"
#include "ponzi/flows.hpp"

#include <doctest.h>
#include <json.hpp>

#include <random>

using namespace ponzi;
using namespace ponzi::flows;
using testsupport::addr;
using testsupport::member;
using testsupport::tx;

namespace {

const std::string In = addr(1), Th = addr(2), Id = addr(3), Nc = addr(4);  // Nc: no country
const std::string Ex = addr(101), Gm = addr(102), Un = addr(103);

Roster roster() { return Roster({member(In, "IN"), member(Th, "TH"), member(Id, "ID"), member(Nc, "")}); }

WalletDirectory wallets() {
    return WalletDirectory({{Ex, "ex-1", WalletCategory::exchanges}, {Gm, "gm-1", WalletCategory::gambling}});
}

txclass::TypedTx typed(const TxRecord& t) { return *txclass::classify(t, roster()); }

}  // namespace

TEST_CASE("categorize_tx") {
    const auto r = roster();
    const auto w = wallets();
    CHECK(categorize_tx(typed(tx(1, "2016-01-01T00:00:00Z", {{Ex, 5}}, {{In, 5}})), w, r) ==
          std::set<WalletCategory>{WalletCategory::exchanges});
    CHECK(categorize_tx(typed(tx(2, "2016-01-01T00:00:00Z", {{In, 5}}, {{Un, 5}})), w, r) ==
          std::set<WalletCategory>{WalletCategory::unknown});
    CHECK(categorize_tx(typed(tx(3, "2016-01-01T00:00:00Z", {{Ex, 5}, {Gm, 5}}, {{In, 10}})), w, r) ==
          std::set<WalletCategory>{WalletCategory::exchanges, WalletCategory::gambling});
    CHECK_THROWS_AS(categorize_tx(typed(tx(4, "2016-01-01T00:00:00Z", {{In, 5}}, {{Th, 5}})), w, r), InvariantError);
}

TEST_CASE("external shares by incidence and by value") {
    std::vector<TxRecord> txs = {
        tx(1, "2016-01-01T00:00:00Z", {{Ex, 100}}, {{In, 100}}),
        tx(2, "2016-01-01T00:01:00Z", {{Ex, 100}}, {{In, 100}}),
        tx(3, "2016-01-01T00:02:00Z", {{Gm, 400}}, {{In, 400}}),
        tx(4, "2016-01-01T01:00:00Z", {{In, 600}}, {{Th, 600}}),
    };
    const auto ds = testsupport::dataset(txs, {member(In, "IN"), member(Th, "TH")},
                                         testsupport::flat_prices("2016-01-01", "2016-01-01", "400"), wallets());
    const auto inc = external_shares(ds);
    REQUIRE(inc.size() == kWalletCategoryCount);
    CHECK(*inc[static_cast<std::size_t>(WalletCategory::exchanges)].deposit_share == doctest::Approx(2.0 / 3.0));
    CHECK(*inc[static_cast<std::size_t>(WalletCategory::gambling)].deposit_share == doctest::Approx(1.0 / 3.0));
    CHECK(*inc[static_cast<std::size_t>(WalletCategory::unknown)].deposit_share == 0.0);
    CHECK_FALSE(inc[0].withdrawal_share.has_value());
    double sum = 0;
    for (const auto& s : inc) sum += *s.deposit_share;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    const auto val = external_shares(ds, ShareMode::value_weighted);
    CHECK(*val[static_cast<std::size_t>(WalletCategory::exchanges)].deposit_share == doctest::Approx(1.0 / 3.0));
    CHECK(*val[static_cast<std::size_t>(WalletCategory::gambling)].deposit_share == doctest::Approx(2.0 / 3.0));

    const auto text = shares_csv(inc);
    CHECK(text.rfind("category,deposit_share,withdrawal_share\nunknown,0.000000,\nexchanges,0.666667,\n", 0) == 0);
    const auto j = nlohmann::json::parse(shares_json(inc));
    CHECK(j.size() == kWalletCategoryCount);
}

TEST_CASE("proportional geo attribution") {
    const auto r = roster();
    CHECK(attribute_geo(typed(tx(1, "2016-01-01T00:00:00Z", {{In, 100'000}}, {{Id, 100'000}})), r) ==
          std::vector<GeoFlow>{{"IN", "ID", 100'000}});
    // the second output has no known country
    CHECK(attribute_geo(typed(tx(2, "2016-01-01T00:00:00Z", {{In, 60'000}, {Th, 40'000}}, {{Id, 50'000}, {Nc, 50'000}})),
                        r) == std::vector<GeoFlow>{{"IN", "ID", 30'000}, {"TH", "ID", 20'000}});
    CHECK(attribute_geo(typed(tx(3, "2016-01-01T00:00:00Z", {{In, 60'000}, {Ex, 40'000}}, {{Id, 50'000}, {Un, 50'000}})),
                        r) == std::vector<GeoFlow>{{"IN", "ID", 30'000}});
    CHECK(attribute_geo(typed(tx(4, "2016-01-01T00:00:00Z", {{Nc, 10}}, {{Id, 10}})), r).empty());
    // zero-valued outputs only
    CHECK(attribute_geo(typed(tx(5, "2016-01-01T00:00:00Z", {{In, 10}}, {{Id, 0}})), r).empty());
}

TEST_CASE("geo attribution: largest remainder, conservation, order independence") {
    const auto r = roster();
    const std::vector<std::string> pool = {In, Th, Id, Nc, Ex, Un};
    std::mt19937_64 rng(11);
    for (int round = 0; round < 500; ++round) {
        TxRecord t = tx(static_cast<unsigned>(round), "2016-01-01T00:00:00Z", {{In, 1 + static_cast<Satoshi>(rng() % 1000)}},
                        {{Id, 1 + static_cast<Satoshi>(rng() % 1000)}});
        for (int k = static_cast<int>(rng() % 4); k > 0; --k)
            t.inputs.push_back({pool[rng() % pool.size()], static_cast<Satoshi>(rng() % 100'000)});
        for (int k = static_cast<int>(rng() % 4); k > 0; --k)
            t.outputs.push_back({pool[rng() % pool.size()], static_cast<Satoshi>(rng() % 100'000)});

        const auto flows = attribute_geo(typed(t), r);
        __int128 in_known = 0, out_known = 0, out_total = 0;
        for (const auto& io : t.inputs)
            if (const auto* m = r.find(io.addr); m && !m->country.empty()) in_known += io.value;
        for (const auto& io : t.outputs) {
            out_total += io.value;
            if (const auto* m = r.find(io.addr); m && !m->country.empty()) out_known += io.value;
        }
        Satoshi total = 0;
        for (const auto& f : flows) {
            CHECK(f.sat > 0);
            total += f.sat;
        }
        CHECK(total == static_cast<Satoshi>(in_known * out_known / out_total));
        CHECK(total <= static_cast<Satoshi>(in_known));

        auto shuffled = t;
        std::shuffle(shuffled.inputs.begin(), shuffled.inputs.end(), rng);
        std::shuffle(shuffled.outputs.begin(), shuffled.outputs.end(), rng);
        CHECK(attribute_geo(typed(shuffled), r) == flows);
    }
}

TEST_CASE("geo network, asymmetry and exports") {
    std::vector<TxRecord> txs = {
        tx(1, "2016-01-01T00:00:00Z", {{In, 3'000'000}}, {{Id, 3'000'000}}),  // $12 at $400
        tx(2, "2016-01-02T00:00:00Z", {{In, 1'000'000}}, {{Id, 1'000'000}}),  // $5 at $500
        tx(3, "2016-01-02T01:00:00Z", {{Id, 200'000}}, {{In, 100'000}, {Th, 100'000}}),
        tx(4, "2016-01-02T02:00:00Z", {{In, 50'000}}, {{In, 50'000}, {Id, 0}}),
        tx(5, "2016-01-02T03:00:00Z", {{In, 500'000}}, {{addr(5), 500'000}}),
    };
    std::map<Date, UsdPerBtc> prices = {{Date::parse("2016-01-01"), UsdPerBtc::parse("400")},
                                        {Date::parse("2016-01-02"), UsdPerBtc::parse("500")}};
    std::vector<MemberRecord> members = {member(In, "IN"), member(Th, "TH"), member(Id, "ID"), member(addr(5), "IN")};
    members[3].member_id = members[0].member_id;  // second address of the same member
    const auto ds = testsupport::dataset(txs, members, PriceTable(prices));
    const auto g = build_geo_network(ds);

    CHECK(g.nodes.at("IN") == 1);
    CHECK(g.nodes.at("ID") == 1);
    CHECK(g.nodes.at("TH") == 1);
    REQUIRE(g.edge("IN", "ID") != nullptr);
    CHECK(g.edge("IN", "ID")->usd.str() == "17.00");
    CHECK(g.edge("IN", "ID")->sat == 4'000'000);
    CHECK(g.edge("ID", "IN")->usd.str() == "0.50");
    CHECK(g.edge("IN", "IN")->self_loop());
    CHECK(g.edge("TH", "IN") == nullptr);
    CHECK(g.inter_country_edges() == 3);

    const auto a = asymmetry(g, "IN", "ID");
    CHECK(*a.ratio == doctest::Approx(34.0));
    CHECK(a.forward.str() == "17.00");
    const auto one_sided = asymmetry(g, "ID", "TH");
    CHECK_FALSE(one_sided.ratio.has_value());
    CHECK(one_sided.forward.str() == "0.50");
    CHECK_THROWS_AS(asymmetry(g, "TH", "XX"), InputError);

    const auto dot = geo_dot(g);
    CHECK(dot.find("\"IN\" -> \"ID\"") != std::string::npos);
    CHECK(dot.find("\"IN\" -> \"IN\"") == std::string::npos);
    CHECK(geo_dot(g, {true}).find("\"IN\" -> \"IN\"") != std::string::npos);
    const auto j = nlohmann::json::parse(geo_json(g));
    CHECK(j["edges"].size() == g.edges.size());
}

TEST_CASE("graph totals equal per-transaction attributed usd") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> members = {In, Th, Id};
    std::vector<TxRecord> txs;
    for (unsigned i = 0; i < 200; ++i) {
        const auto& a = members[rng() % 3];
        const auto& b = members[rng() % 3];
        char time[32];
        std::snprintf(time, sizeof time, "2016-01-%02uT%02u:%02u:00Z", 1 + i % 5, i % 24, i % 60);
        txs.push_back(tx(i + 1, time, {{a, 1 + static_cast<Satoshi>(rng() % 9'000'000)}},
                         {{b, 1 + static_cast<Satoshi>(rng() % 4'000'000)}, {Th, static_cast<Satoshi>(rng() % 3'000'000)}}));
    }
    const auto ds = testsupport::dataset(txs, {member(In, "IN"), member(Th, "TH"), member(Id, "ID")},
                                         testsupport::flat_prices("2016-01-01", "2016-01-05", "433.47"));
    const auto g = build_geo_network(ds);
    std::int64_t want = 0, got = 0;
    for (const auto& t : ds.transactions())
        for (const auto& f : attribute_geo(t, ds.roster())) want += ds.prices().to_usd(f.sat, t.day).cents;
    for (const auto& e : g.edges) got += e.usd.cents;
    CHECK(got == want);
}
