#pragma once

#include "ponzi/address.hpp"
#include "ponzi/coredata.hpp"
#include "ponzi/dataset.hpp"

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace testsupport {

/// Deterministic valid P2PKH (or P2SH with version 5) address for index i.
inline std::string addr(unsigned i, std::uint8_t version = 0x00) {
    std::array<std::uint8_t, 20> payload{};
    for (int k = 0; k < 4; ++k) payload[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(i >> (8 * k));
    payload[19] = 0x5a;
    return ponzi::base58check_encode(version, payload);
}

inline std::string txid(unsigned i) {
    char buf[65];
    std::snprintf(buf, sizeof buf, "%064x", i);
    return buf;
}

inline ponzi::TxRecord tx(unsigned id, const std::string& time, std::vector<ponzi::TxIO> in, std::vector<ponzi::TxIO> out,
                          bool coinbase = false) {
    ponzi::TxRecord t;
    t.txid = txid(id);
    t.time = ponzi::Timestamp::parse(time);
    t.coinbase = coinbase;
    t.inputs = std::move(in);
    t.outputs = std::move(out);
    return t;
}

inline ponzi::MemberRecord member(const std::string& address, const std::string& country = "") {
    ponzi::MemberRecord m;
    m.address = address;
    m.member_id = "m-" + address.substr(0, 8);
    m.country = country;
    return m;
}

/// Constant price on every day of the inclusive range.
inline ponzi::PriceTable flat_prices(const std::string& first, const std::string& last, const std::string& usd) {
    std::map<ponzi::Date, ponzi::UsdPerBtc> m;
    for (auto d = ponzi::Date::parse(first); d <= ponzi::Date::parse(last); d = d + 1) m[d] = ponzi::UsdPerBtc::parse(usd);
    return ponzi::PriceTable(std::move(m));
}

/// Cleaned dataset over every transaction day.
inline ponzi::SchemeDataset dataset(const std::vector<ponzi::TxRecord>& txs, std::vector<ponzi::MemberRecord> members,
                                    ponzi::PriceTable prices, ponzi::WalletDirectory wallets = {}) {
    return ponzi::build_dataset(txs, std::move(members), std::move(wallets), std::move(prices),
                                ponzi::WindowSpec::everything());
}

}  // namespace testsupport
