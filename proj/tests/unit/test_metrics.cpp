#include "support.hpp"

#include "ponzi/errors.hpp"
#include "ponzi/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace ponzi;
using namespace ponzi::metrics;
using testsupport::addr;
using testsupport::member;
using testsupport::tx;

namespace {

const std::string A = addr(1), B = addr(2), C = addr(3);
const std::string X = addr(101), Y = addr(102);
const Date D1 = Date::parse("2016-01-01"), D2 = Date::parse("2016-01-02");

// Two days at $400/BTC (1e6 sat = $4.00):
//  day 1: deposit X->A 2e6; ponzi A->B 1.5e6, C 0.5e6; ponzi B 1e6 -> C 0.9e6, X 0.1e6
//  day 2: ponzi C 0.4e6 -> A; withdrawal C 1e6 -> Y
SchemeDataset fixture() {
    std::vector<TxRecord> txs = {
        tx(1, "2016-01-01T01:00:00Z", {{X, 2'000'000}}, {{A, 2'000'000}}),
        tx(2, "2016-01-01T02:00:00Z", {{A, 2'000'000}}, {{B, 1'500'000}, {C, 500'000}}),
        tx(3, "2016-01-01T03:00:00Z", {{B, 1'000'000}}, {{C, 900'000}, {X, 100'000}}),
        tx(4, "2016-01-02T01:00:00Z", {{C, 400'000}}, {{A, 400'000}}),
        tx(5, "2016-01-02T02:00:00Z", {{C, 1'000'000}}, {{Y, 1'000'000}}),
    };
    return testsupport::dataset(txs, {member(A), member(B), member(C)},
                                testsupport::flat_prices("2016-01-01", "2016-01-02", "400.00"));
}

// sum_ij |x_i - x_j| / (2 n sum x), straight from the definition
std::pair<__int128, __int128> gini_brute(const std::vector<Satoshi>& x) {
    __int128 diff = 0, total = 0;
    for (auto a : x) {
        total += a;
        for (auto b : x) diff += a > b ? a - b : b - a;
    }
    if (total == 0) return {0, 1};
    return {diff, 2 * static_cast<__int128>(x.size()) * total};
}

bool same_ratio(const GiniRatio& g, std::pair<__int128, __int128> want) {
    return g.num * want.second == want.first * g.den;
}

}  // namespace

TEST_CASE("daily lifecycle metrics") {
    const auto ds = fixture();
    CHECK(dtv(ds, D1) == 3);
    CHECK(dtv(ds, D2) == 2);
    CHECK(dmf(ds, D1, AggregateKind::sum).str() == "19.60");
    CHECK(dmf(ds, D1, AggregateKind::max).str() == "8.00");
    CHECK(dmf(ds, D1, AggregateKind::mean).str() == "6.53");
    CHECK(dfr(ds, D1)->str() == "6.53");
    CHECK(dmf(ds, D2, AggregateKind::sum).str() == "5.60");
}

TEST_CASE("per-address flows and DND") {
    const auto ds = fixture();
    CHECK(dni(ds, A, D1) == 0);
    CHECK(dns(ds, A, D1) == 2'000'000);
    CHECK(dnw(ds, B, D1) == 500'000);
    CHECK(dni(ds, C, D1) == 1'400'000);
    CHECK(dnw(ds, C, D2) == -400'000);
    // withdrawals are not ponzi flows
    CHECK(dns(ds, C, D2) == 400'000);
    CHECK(address_flows(ds, D1).at(B).ponzi_txs == 2);

    CHECK(dnd_sat(ds, D1) == -100'000);
    CHECK(dnd(ds, D1).str() == "-0.40");
    CHECK(dnd_sat(ds, D2) == 0);
    CHECK(total_dnd(ds, {D1, D2}).str() == "-0.40");
    CHECK(total_abs_dnd(ds, {D1, D2}).str() == "0.40");
}

TEST_CASE("DGI on the fixture") {
    const auto ds = fixture();
    const auto want = gini_brute({0, 1'500'000, 1'400'000});
    CHECK(*dgi(ds, D1) == doctest::Approx(static_cast<double>(want.first) / static_cast<double>(want.second)));
    // same population on day 2: A receives, C pays
    CHECK(*dgi(ds, D2) == doctest::Approx(0.5));
    CHECK(*dgi(ds, D2, GiniPopulation::all_roster) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("gini boundaries") {
    CHECK_FALSE(gini(std::vector<Satoshi>{}).has_value());
    CHECK(gini(std::vector<Satoshi>{0, 0, 0})->num == 0);
    CHECK(gini(std::vector<Satoshi>{7, 7, 7, 7})->num == 0);
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<Satoshi> x(n, 0);
        x[n / 2] = 12345;
        const auto g = *gini(x);
        CHECK(same_ratio(g, {static_cast<__int128>(n - 1), static_cast<__int128>(n)}));
    }
    CHECK_THROWS_AS(gini(std::vector<Satoshi>{1, -1}), InvariantError);
}

TEST_CASE("gini matches the O(n^2) definition") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 500; ++round) {
        std::vector<Satoshi> x(1 + rng() % 60);
        const Satoshi scale = round % 2 ? 2'100'000'000'000'000 : 1000;
        for (auto& v : x) v = rng() % 4 == 0 ? 0 : static_cast<Satoshi>(rng() % static_cast<std::uint64_t>(scale));
        const auto g = *gini(x);
        CHECK(same_ratio(g, gini_brute(x)));
        CHECK(g.value() >= 0.0);
        CHECK(g.value() < 1.0);
    }
}

TEST_CASE("net worth ledger") {
    const auto ds = fixture();
    const NetWorthLedger ledger(ds, {D1, D2});
    CHECK(ledger.tnw(A, D1) == -2'000'000);
    CHECK(ledger.tnw(A, D2) == -1'600'000);
    CHECK(ledger.ponzi_tx_count(A, D2) == 2);
    CHECK(ledger.tnw(B, D2) == 500'000);
    CHECK(ledger.ponzi_tx_count(B, D2) == 2);
    CHECK(ledger.tnw(C, D2) == 1'000'000);
    CHECK(ledger.ponzi_tx_count(C, D2) == 3);
    CHECK(ledger.tnw(X, D2) == 0);
    CHECK_FALSE(ledger.tnw_norm(X, D2).has_value());
    CHECK(*ledger.tnw_norm(A, D2) == NormalizedWorth{-800'000, 1});
    CHECK(ledger.tnw_usd(A, D2).str() == "-6.40");

    CHECK(*ledger.cvr(D1) == doctest::Approx(1.0 / 3.0));
    CHECK(ledger.cvr_series()[1].victims == 1);
    CHECK(ledger.cvr_series()[1].active == 3);
    CHECK(ledger.standings(D2).size() == 3);
    CHECK_THROWS_AS(ledger.cvr(Date::parse("2016-01-03")), InputError);

    const auto csv_text = ledger.csv();
    CHECK(csv_text.rfind("address,day,dni,dns,dnw,tnw,tnw_norm,ponzi_tx_count\n", 0) == 0);
    CHECK(csv_text.find(A + ",2016-01-01,0,2000000,-2000000,-2000000,-2000000.00,1\n") != std::string::npos);

    CHECK_THROWS_AS(NetWorthLedger(ds, {D2, D1}), InputError);
    CHECK_THROWS_AS(NetWorthLedger(ds, {D1, Date::parse("2016-02-01")}), InputError);
}

TEST_CASE("CVR with the whole roster as denominator") {
    const auto ds = testsupport::dataset(
        {tx(1, "2016-01-01T01:00:00Z", {{A, 10}}, {{B, 10}})},
        {member(A), member(B), member(C), member(addr(4))},
        testsupport::flat_prices("2016-01-01", "2016-01-01", "1.00"));
    CHECK(*NetWorthLedger(ds, {D1, D1}).cvr(D1) == doctest::Approx(0.5));
    CHECK(*NetWorthLedger(ds, {D1, D1}, CvrDenominator::all_roster).cvr(D1) == doctest::Approx(0.25));
}

TEST_CASE("normalised worth ordering is exact") {
    CHECK(NormalizedWorth{1, 3} < NormalizedWorth{1, 2});
    CHECK(NormalizedWorth{-1, 2} < NormalizedWorth{-1, 3});
    CHECK(NormalizedWorth{2, 4} == NormalizedWorth{1, 2});
}

TEST_CASE("daily rows and serialisation") {
    const auto ds = fixture();
    const auto rows = daily_metrics(ds);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dmf_sum_sat == 4'900'000);
    CHECK(rows[0].ponzi_input_sat == 3'000'000);
    CHECK(rows[0].dnd_sat == -100'000);
    const auto text = daily_csv(rows);
    CHECK(text.rfind("day,dtv,dmf_sum,dmf_mean,dmf_max,dfr,dgi,dnd,dmf_sum_sat,dnd_sat,ponzi_input_sat\n", 0) == 0);
    CHECK(text.find("2016-01-01,3,19.60,6.53,8.00,6.53,") != std::string::npos);
    CHECK(daily_json(rows).find("\"dnd_usd\": \"-0.40\"") != std::string::npos);
}

TEST_CASE("a missing price fails only on active days") {
    std::vector<TxRecord> txs = {
        tx(1, "2016-01-01T01:00:00Z", {{A, 10}}, {{B, 10}}),
        tx(2, "2016-01-03T01:00:00Z", {{B, 10}}, {{A, 10}}),
    };
    std::map<Date, UsdPerBtc> p = {{D1, UsdPerBtc::parse("1")}, {Date::parse("2016-01-03"), UsdPerBtc::parse("1")}};
    const auto ds = testsupport::dataset(txs, {member(A), member(B)}, PriceTable(p));
    CHECK_NOTHROW(daily_metrics(ds));
    CHECK(ds.day_count() == 3);

    p.erase(D1);
    const auto bad = testsupport::dataset(txs, {member(A), member(B)}, PriceTable(p));
    CHECK_THROWS_AS(daily_metrics(bad), InputError);
}
