#pragma once

// External-service flow shares and the country-level money-flow network.

#include "ponzi/dataset.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ponzi::flows {

/// Wallet categories of the counterparties: inputs for deposits, non-roster
/// outputs for withdrawals. Throws InvariantError for ponzi transactions.
std::set<WalletCategory> categorize_tx(const txclass::TypedTx& t, const WalletDirectory& wallets, const Roster& roster);

enum class ShareMode {
    incidence,       // one count per distinct category per transaction
    value_weighted,  // counterparty satoshi per category
};

struct CategoryShare {
    WalletCategory category;
    std::optional<double> deposit_share;
    std::optional<double> withdrawal_share;
};

/// One row per category, in enum order. A direction with no transactions has
/// null shares.
std::vector<CategoryShare> external_shares(const SchemeDataset& ds, ShareMode mode = ShareMode::incidence);
std::string shares_csv(const std::vector<CategoryShare>& shares);
std::string shares_json(const std::vector<CategoryShare>& shares);

struct GeoFlow {
    std::string from;
    std::string to;
    Satoshi sat = 0;
    friend bool operator==(const GeoFlow&, const GeoFlow&) = default;
};

/// Proportional attribution value_in(a) * value_out(b) / total_output over
/// roster addresses with a known country, aggregated per country pair. The
/// fractional satoshi are apportioned by largest remainder so the pair totals
/// sum to the floor of the exact total. Sorted by (from, to).
std::vector<GeoFlow> attribute_geo(const txclass::TypedTx& t, const Roster& roster);

struct GeoEdge {
    std::string from;
    std::string to;
    UsdCents usd;
    Satoshi sat = 0;
    std::size_t member_count_from = 0;
    std::size_t member_count_to = 0;
    bool self_loop() const { return from == to; }
};

struct GeoNetwork {
    /// country -> distinct members of that country active in ponzi transactions
    std::map<std::string, std::size_t> nodes;
    std::vector<GeoEdge> edges;  // sorted by (from, to)

    const GeoEdge* edge(std::string_view from, std::string_view to) const;
    std::size_t inter_country_edges() const;
};

/// Edge usd is the sum over transactions of each attributed amount converted
/// at that transaction's day price.
GeoNetwork build_geo_network(const SchemeDataset& ds);

struct Asymmetry {
    std::optional<double> ratio;   // usd(a->b) / usd(b->a); null when one-sided
    UsdCents forward;              // a -> b
    UsdCents backward;             // b -> a
};

/// Throws InputError when neither edge exists.
Asymmetry asymmetry(const GeoNetwork& g, std::string_view a, std::string_view b);

struct DotOptions {
    bool include_self_loops = false;
};
std::string geo_dot(const GeoNetwork& g, DotOptions opts = {});
std::string geo_json(const GeoNetwork& g);

}  // namespace ponzi::flows
