#include "support.hpp"

#include "ponzi/classify.hpp"
#include "ponzi/errors.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace ponzi;
using namespace ponzi::classify;
using metrics::NetWorthLedger;
using testsupport::addr;
using testsupport::member;
using testsupport::tx;

namespace {

constexpr Satoshi U = 100'000;  // $0.40 at $400, so 100U is $40
const std::string S1 = addr(1), S2 = addr(2), L = addr(3);
const std::vector<std::string> V = {addr(11), addr(12), addr(13), addr(14), addr(15)};
const std::string E1 = addr(201), E2 = addr(202), X = addr(203);
const Date kFirst = Date::parse("2016-01-15"), kLast = Date::parse("2016-03-10");

std::string at(Date d, int hour) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", hour);
    return d.str() + "T" + buf + ":00:00Z";
}

// Daily, a victim pays 200U: S1 gets 100U, S2 90U, the next victim 10U.
// L gets lucky on the first day and loses it all on Feb 1.
SchemeDataset fixture() {
    std::vector<TxRecord> txs;
    unsigned id = 1;
    int i = 0;
    for (Date d = kFirst; d <= kLast; d = d + 1, ++i) {
        const auto& payer = V[static_cast<std::size_t>(i) % V.size()];
        const auto& next = V[static_cast<std::size_t>(i + 1) % V.size()];
        txs.push_back(tx(id++, at(d, 12), {{payer, 200 * U}}, {{S1, 100 * U}, {S2, 90 * U}, {next, 10 * U}}));
    }
    txs.push_back(tx(id++, at(kFirst, 13), {{V[1], 10'000 * U}}, {{L, 10'000 * U}}));
    txs.push_back(tx(id++, at(Date::parse("2016-02-01"), 13), {{L, 20'000 * U}}, {{V[2], 50 * U}, {X, 19'950 * U}}));
    // deposits into S1: E1 contributes most of the larger one
    txs.push_back(tx(id++, at(Date::parse("2016-01-20"), 1), {{E1, 500 * U}, {E2, 300 * U}}, {{S1, 800 * U}}));
    txs.push_back(tx(id++, at(Date::parse("2016-01-21"), 1), {{X, 100 * U}}, {{S1, 100 * U}}));
    // withdrawals from S1
    txs.push_back(tx(id++, at(Date::parse("2016-02-10"), 20), {{S1, 300 * U}}, {{X, 300 * U}}));
    txs.push_back(tx(id++, at(Date::parse("2016-03-01"), 20), {{S1, 1000 * U}}, {{E2, 600 * U}, {X, 400 * U}}));

    std::vector<MemberRecord> roster = {member(S1), member(S2), member(L)};
    roster[0].registration_date = Date::parse("2015-12-01");
    for (const auto& v : V) roster.push_back(member(v));
    WalletDirectory wallets({{E1, "ex-01", WalletCategory::exchanges}, {E2, "ex-01", WalletCategory::exchanges}});
    return testsupport::dataset(txs, roster, testsupport::flat_prices("2016-01-01", "2016-03-31", "400.00"), wallets);
}

}  // namespace

TEST_CASE("daily labels") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {kFirst, kLast});
    CHECK(label(ledger, V[0], kFirst) == Label::victim);
    CHECK(label(ledger, S1, kFirst) == Label::non_victim);
    CHECK(label(ledger, L, kFirst) == Label::non_victim);
    CHECK(label(ledger, L, Date::parse("2016-02-01")) == Label::victim);
    CHECK(label(ledger, V[4], kFirst) == Label::unlabeled);
    CHECK(label(ledger, X, kLast) == Label::unlabeled);
    CHECK(to_string(Label::non_victim) == "non_victim");
}

TEST_CASE("daily ranking") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {kFirst, kLast});
    const auto top = rank_daily(ledger, kFirst, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].first == L);
    CHECK(top[1].first == S1);
    CHECK(rank_daily(ledger, kFirst, 100).size() == 5);
    const auto feb = rank_daily(ledger, Date::parse("2016-02-01"), 3);
    CHECK(feb[0].first == S1);
    CHECK(feb[1].first == S2);
    CHECK(feb[2].first != L);
}

TEST_CASE("likely scammers persist across months") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {kFirst, kLast});
    const auto found = likely_scammers(ledger, {3, false});
    CHECK(found.monthly.size() == 3);
    CHECK(found.monthly.at("2016-01") == std::set<std::string>{S1, S2, L});
    CHECK(found.scammers == std::set<std::string>{S1, S2});

    const auto full = likely_scammers(ledger, {3, true});
    CHECK(full.monthly.count("2016-02") == 1);
    CHECK(full.monthly.size() == 1);
    CHECK(full.scammers.count(S1) == 1);
    CHECK(full.scammers.count(L) == 0);
}

TEST_CASE("likely scammers need at least one month") {
    const auto ds = fixture();
    CHECK_THROWS_AS(likely_scammers(NetWorthLedger(ds, {kFirst, Date::parse("2016-02-10")})), InputError);
    CHECK_NOTHROW(likely_scammers(NetWorthLedger(ds, {kFirst, Date::parse("2016-02-15")})));
    CHECK_THROWS_AS(likely_scammers(NetWorthLedger(ds, {kFirst, Date::parse("2016-02-20")}), {10, true}), InputError);
}

TEST_CASE("counterparties") {
    const auto ds = fixture();
    const auto dep = top_deposit_from(ds, S1);
    REQUIRE(dep);
    CHECK(dep->address == E1);
    CHECK(dep->wallet_id == "ex-01");
    CHECK(dep->usd.str() == "320.00");
    CHECK(dep->txid == testsupport::txid(static_cast<unsigned>(kLast - kFirst + 4)));

    const auto wd = top_withdrawal_to(ds, S1);
    REQUIRE(wd);
    CHECK(wd->address == E2);
    CHECK(wd->usd.str() == "400.00");
    CHECK_FALSE(top_deposit_from(ds, S2).has_value());
    CHECK_FALSE(top_withdrawal_to(ds, S2).has_value());
}

TEST_CASE("scammer report") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {kFirst, kLast});
    const auto rows = scammer_report(ds, ledger, {S2, S1, V[0]});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].address == S1);
    CHECK(rows[1].address == S2);
    const auto days = kLast - kFirst + 1;
    CHECK(rows[0].final_tnw_sat == 100 * U * days);
    CHECK(rows[0].final_tnw.cents == 4000 * days);
    CHECK(rows[0].wallet_size == 1);
    CHECK(rows[0].registration_date == Date::parse("2015-12-01"));
    CHECK_FALSE(rows[1].registration_date.has_value());

    const auto text = scammers_csv(rows);
    CHECK(text.rfind("address,final_tnw_usd,final_tnw_sat,wallet_size,registration_date,", 0) == 0);
    CHECK(text.find(S1 + "," + UsdCents{4000 * days}.str() + ",") != std::string::npos);
    const auto j = nlohmann::json::parse(scammers_json(rows));
    CHECK(j[0]["top_deposit_from"]["address"] == E1);
    CHECK(j[1]["top_withdrawal_to"].is_null());
}

TEST_CASE("victim series output") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {kFirst, kLast});
    const auto text = victims_csv(ledger.cvr_series());
    CHECK(text.rfind("day,cvr,active_count,victim_count\n2016-01-15,0.400000,5,2\n", 0) == 0);
    const auto j = nlohmann::json::parse(victims_json(ledger.cvr_series()));
    CHECK(j.size() == static_cast<std::size_t>(kLast - kFirst + 1));
    CHECK(j[0]["victim_count"] == 2);
}
