#include "ponzi/coredata.hpp"

#include "ponzi/address.hpp"
#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ponzi {

using nlohmann::json;

namespace {

// ISO 3166-1 alpha-2, officially assigned codes.
constexpr std::string_view kCountries =
    "AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ BA BB BD BE BF BG BH BI BJ BL BM BN BO BQ BR BS "
    "BT BV BW BY BZ CA CC CD CF CG CH CI CK CL CM CN CO CR CU CV CW CX CY CZ DE DJ DK DM DO DZ EC EE "
    "EG EH ER ES ET FI FJ FK FM FO FR GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY HK HM "
    "HN HR HT HU ID IE IL IM IN IO IQ IR IS IT JE JM JO JP KE KG KH KI KM KN KP KR KW KY KZ LA LB LC "
    "LI LK LR LS LT LU LV LY MA MC MD ME MF MG MH MK ML MM MN MO MP MQ MR MS MT MU MV MW MX MY MZ NA "
    "NC NE NF NG NI NL NO NP NR NU NZ OM PA PE PF PG PH PK PL PM PN PR PS PT PW PY QA RE RO RS RU RW "
    "SA SB SC SD SE SG SH SI SJ SK SL SM SN SO SR SS ST SV SX SY SZ TC TD TF TG TH TJ TK TL TM TN TO "
    "TR TT TV TW TZ UA UG UM US UY UZ VA VC VE VG VI VN VU WF WS YE YT ZA ZM ZW";

constexpr std::array<std::string_view, kWalletCategoryCount> kCategoryNames{
    "unknown", "exchanges", "pools", "generic", "mixers", "gambling", "ponzi", "darkweb"};

Satoshi sum_values(const std::vector<TxIO>& ios) {
    Satoshi s = 0;
    for (const auto& io : ios) s += io.value;
    return s;
}

std::vector<TxIO> parse_ios(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw InputError(where + ": inputs/outputs must be arrays");
    std::vector<TxIO> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("addr") || !item.contains("value"))
            throw InputError(where + ": each input/output needs addr and value");
        const auto& addr = item.at("addr");
        const auto& value = item.at("value");
        if (!addr.is_string()) throw InputError(where + ": addr must be a string");
        if (!value.is_number_integer()) throw InputError(where + ": value must be an integer");
        if (value.is_number_unsigned()) {
            const auto v = value.get<std::uint64_t>();
            if (v > static_cast<std::uint64_t>(INT64_MAX)) throw InputError(where + ": value out of range");
        } else if (value.get<std::int64_t>() < 0) {
            throw InputError(where + ": negative value");
        }
        TxIO io{addr.get<std::string>(), value.get<std::int64_t>()};
        if (io.addr != kUnparseableAddress && !match_address(io.addr))
            throw InputError(where + ": '" + io.addr + "' is not a recognised address");
        out.push_back(std::move(io));
    }
    return out;
}

std::optional<int> parse_int_field(std::string_view s, const std::string& where) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 0 || v > 150)
        throw InputError(where + ": invalid age '" + std::string(s) + "'");
    return v;
}

}  // namespace

Satoshi TxRecord::input_total() const { return sum_values(inputs); }
Satoshi TxRecord::output_total() const { return sum_values(outputs); }
Satoshi TxRecord::fee() const { return coinbase ? 0 : input_total() - output_total(); }

std::string_view to_string(WalletCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::male: return "male";
        case Gender::female: return "female";
        case Gender::unspecified: return "";
    }
    return "";
}

WalletCategory parse_category(std::string_view text) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == text) return static_cast<WalletCategory>(i);
    throw InputError("unknown wallet category '" + std::string(text) + "'");
}

Gender parse_gender(std::string_view text) {
    if (text.empty() || text == "unspecified") return Gender::unspecified;
    if (text == "male") return Gender::male;
    if (text == "female") return Gender::female;
    throw InputError("unknown gender '" + std::string(text) + "'");
}

bool is_iso_country(std::string_view code) {
    if (code.size() != 2) return false;
    for (std::size_t i = 0; i + 1 < kCountries.size(); i += 3)
        if (kCountries.substr(i, 2) == code) return true;
    return false;
}

bool is_txid(std::string_view text) {
    return text.size() == 64 && std::all_of(text.begin(), text.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

// ---- WalletDirectory ---------------------------------------------------

WalletDirectory::WalletDirectory(std::vector<WalletEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!by_address_.emplace(entries_[i].address, i).second)
            throw InputError("wallet directory lists address " + entries_[i].address + " twice");
        ++sizes_[entries_[i].wallet_id];
    }
}

WalletEntry WalletDirectory::lookup(std::string_view address) const {
    const auto it = by_address_.find(std::string(address));
    if (it == by_address_.end()) return {std::string(address), std::string(address), WalletCategory::unknown};
    return entries_[it->second];
}

WalletCategory WalletDirectory::category(std::string_view address) const {
    const auto it = by_address_.find(std::string(address));
    return it == by_address_.end() ? WalletCategory::unknown : entries_[it->second].category;
}

std::string WalletDirectory::wallet_id(std::string_view address) const {
    const auto it = by_address_.find(std::string(address));
    return it == by_address_.end() ? std::string(address) : entries_[it->second].wallet_id;
}

std::size_t WalletDirectory::wallet_size(std::string_view wallet_id) const {
    const auto it = sizes_.find(std::string(wallet_id));
    return it == sizes_.end() ? 1 : it->second;
}

// ---- PriceTable --------------------------------------------------------

PriceTable::PriceTable(std::map<Date, UsdPerBtc> prices) : prices_(std::move(prices)) {
    for (const auto& [d, p] : prices_)
        if (p.e8 <= 0) throw InputError("price for " + d.str() + " is not positive");
}

UsdPerBtc PriceTable::at(Date day) const {
    const auto it = prices_.find(day);
    if (it == prices_.end()) throw InputError("no USD price for " + day.str());
    return it->second;
}

// ---- Roster ------------------------------------------------------------

Roster::Roster(std::vector<MemberRecord> members) : members_(std::move(members)) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const auto& m = members_[i];
        if (!match_address(m.address)) throw InputError("roster address '" + m.address + "' is not valid");
        if (!m.country.empty() && !is_iso_country(m.country))
            throw InputError("roster address " + m.address + ": invalid country '" + m.country + "'");
        if (!index_.emplace(m.address, i).second)
            throw InputError("roster lists address " + m.address + " more than once");
    }
}

bool Roster::contains(std::string_view address) const { return index_.count(std::string(address)) != 0; }

const MemberRecord* Roster::find(std::string_view address) const {
    const auto it = index_.find(std::string(address));
    return it == index_.end() ? nullptr : &members_[it->second];
}

// ---- transactions ------------------------------------------------------

std::vector<TxRecord> parse_transactions(std::string_view ndjson, const std::string& source) {
    std::vector<TxRecord> out;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < ndjson.size()) {
        auto nl = ndjson.find('\n', pos);
        if (nl == std::string_view::npos) nl = ndjson.size();
        std::string_view line = ndjson.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        const std::string where = source + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(where + ": malformed JSON (" + e.what() + ")");
        }
        if (!j.is_object()) throw InputError(where + ": expected a JSON object");
        for (const char* key : {"txid", "time", "coinbase", "inputs", "outputs"})
            if (!j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
        if (!j["txid"].is_string() || !j["time"].is_string() || !j["coinbase"].is_boolean())
            throw InputError(where + ": wrong field types");

        TxRecord tx;
        tx.txid = j["txid"].get<std::string>();
        if (!is_txid(tx.txid)) throw InputError(where + ": txid must be 64 lowercase hex characters");
        try {
            tx.time = Timestamp::parse(j["time"].get<std::string>());
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        tx.coinbase = j["coinbase"].get<bool>();
        tx.inputs = parse_ios(j["inputs"], where);
        tx.outputs = parse_ios(j["outputs"], where);
        if (tx.coinbase && !tx.inputs.empty()) throw InputError(where + ": coinbase transaction with inputs");
        if (!tx.coinbase && tx.output_total() > tx.input_total())
            throw InputError(where + ": outputs exceed inputs in " + tx.txid);
        if (!seen.insert(tx.txid).second) throw InputError(where + ": duplicate txid " + tx.txid);
        out.push_back(std::move(tx));
    }
    return out;
}

std::vector<TxRecord> load_transactions(const std::string& path) { return parse_transactions(read_file(path), path); }

std::string to_ndjson_line(const TxRecord& tx) {
    auto ios = [](const std::vector<TxIO>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& io : v) arr.push_back(nlohmann::ordered_json{{"addr", io.addr}, {"value", io.value}});
        return arr;
    };
    nlohmann::ordered_json j;
    j["txid"] = tx.txid;
    j["time"] = tx.time.str();
    j["coinbase"] = tx.coinbase;
    j["inputs"] = ios(tx.inputs);
    j["outputs"] = ios(tx.outputs);
    return j.dump();
}

std::string to_ndjson(const std::vector<TxRecord>& txs) {
    std::string out;
    for (const auto& tx : txs) {
        out += to_ndjson_line(tx);
        out.push_back('\n');
    }
    return out;
}

// ---- roster ------------------------------------------------------------

std::vector<MemberRecord> parse_roster(std::string_view csv_text, const std::string& source) {
    const auto t = csv::Table::parse(csv_text, source);
    t.require_columns({"address", "member_id", "country", "registration_date", "age", "gender"});
    const auto c_addr = t.column("address"), c_id = t.column("member_id"), c_country = t.column("country"),
               c_reg = t.column("registration_date"), c_age = t.column("age"), c_gender = t.column("gender");
    std::vector<MemberRecord> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const auto& r = t.row(i);
        const std::string where = source + ":" + std::to_string(t.line_of(i));
        MemberRecord m;
        m.address = r[c_addr];
        m.member_id = r[c_id];
        if (m.address.empty() || m.member_id.empty()) throw InputError(where + ": address and member_id are required");
        if (!match_address(m.address)) throw InputError(where + ": '" + m.address + "' is not a valid address");
        if (!seen.insert(m.address).second) throw InputError(where + ": duplicate address " + m.address);
        m.country = r[c_country];
        if (!m.country.empty() && !is_iso_country(m.country))
            throw InputError(where + ": invalid country code '" + m.country + "'");
        try {
            if (!r[c_reg].empty()) m.registration_date = Date::parse(r[c_reg]);
            m.gender = parse_gender(r[c_gender]);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        m.age = parse_int_field(r[c_age], where);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<MemberRecord> load_roster(const std::string& path) { return parse_roster(read_file(path), path); }

std::string roster_csv(const std::vector<MemberRecord>& members) {
    std::string out = "address,member_id,country,registration_date,age,gender\n";
    for (const auto& m : members)
        csv::append_row(out, {m.address, m.member_id, m.country,
                              m.registration_date ? m.registration_date->str() : "",
                              m.age ? std::to_string(*m.age) : "", std::string(to_string(m.gender))});
    return out;
}

// ---- wallets -----------------------------------------------------------

WalletDirectory parse_wallets(std::string_view csv_text, const std::string& source) {
    const auto t = csv::Table::parse(csv_text, source);
    t.require_columns({"address", "wallet_id", "category"});
    const auto c_addr = t.column("address"), c_id = t.column("wallet_id"), c_cat = t.column("category");
    std::vector<WalletEntry> entries;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const auto& r = t.row(i);
        const std::string where = source + ":" + std::to_string(t.line_of(i));
        if (r[c_addr].empty() || r[c_id].empty()) throw InputError(where + ": address and wallet_id are required");
        try {
            entries.push_back({r[c_addr], r[c_id], parse_category(r[c_cat])});
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    try {
        return WalletDirectory(std::move(entries));
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
}

WalletDirectory load_wallets(const std::string& path) { return parse_wallets(read_file(path), path); }

std::string wallets_csv(const std::vector<WalletEntry>& entries) {
    std::string out = "address,wallet_id,category\n";
    for (const auto& e : entries) csv::append_row(out, {e.address, e.wallet_id, std::string(to_string(e.category))});
    return out;
}

// ---- prices ------------------------------------------------------------

PriceTable parse_prices(std::string_view csv_text, const std::string& source) {
    const auto t = csv::Table::parse(csv_text, source);
    t.require_columns({"date", "usd_per_btc"});
    const auto c_date = t.column("date"), c_price = t.column("usd_per_btc");
    std::map<Date, UsdPerBtc> prices;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const auto& r = t.row(i);
        const std::string where = source + ":" + std::to_string(t.line_of(i));
        try {
            const Date d = Date::parse(r[c_date]);
            if (!prices.emplace(d, UsdPerBtc::parse(r[c_price])).second)
                throw InputError("date " + d.str() + " listed twice");
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return PriceTable(std::move(prices));
}

PriceTable load_prices(const std::string& path) { return parse_prices(read_file(path), path); }

std::string prices_csv(const PriceTable& prices) {
    std::string out = "date,usd_per_btc\n";
    for (const auto& [d, p] : prices.prices()) csv::append_row(out, {d.str(), p.str()});
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ponzi
