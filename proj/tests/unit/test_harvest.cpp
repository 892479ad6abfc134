#include "support.hpp"

#include "ponzi/errors.hpp"
#include "ponzi/harvest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace ponzi;
using namespace ponzi::harvest;
using testsupport::addr;

namespace fs = std::filesystem;

namespace {

const std::string kBech32 = "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4";

ProfileDoc profile(std::string id, std::string body, std::optional<std::string> url = std::nullopt) {
    ProfileDoc p;
    p.profile_id = std::move(id);
    p.body = std::move(body);
    p.website_url = std::move(url);
    return p;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ponzi-harvest-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_CASE("address extraction") {
    const std::string p2pkh = addr(7), p2sh = addr(8, 5);
    const auto found = extract_addresses("send to " + p2pkh + ", or " + p2sh + " or " + kBech32 + ". again: " + p2pkh);
    REQUIRE(found.size() == 3);
    CHECK(found[0] == Extracted{p2pkh, AddressKind::P2PKH});
    CHECK(found[1] == Extracted{p2sh, AddressKind::P2SH});
    CHECK(found[2] == Extracted{kBech32, AddressKind::Bech32});
    for (const auto& e : found) CHECK(match_address(e.address) == e.kind);

    // excluded characters break the pattern
    CHECK(extract_addresses("1AOl" + p2pkh.substr(4)).empty());
    // embedded in a longer alphabet run
    CHECK(extract_addresses("abc" + p2pkh + "xyz").empty());
    CHECK(extract_addresses("").empty());

    std::string broken = p2pkh;
    broken.back() = broken.back() == 'z' ? 'y' : 'z';
    CHECK(extract_addresses(broken).size() == 1);
    CHECK(extract_addresses(broken, true).empty());
}

TEST_CASE("member labelling") {
    CHECK(label_member(profile("p", "", "https://mmmglobal.example/u/ABC123")) == "ABC123");
    CHECK_FALSE(label_member(profile("p", "", "https://example.com")).has_value());
    CHECK(label_member(profile("p", "see <a href=\"http://MMMGlobal.org/ref/XYZ9?x=1#top\">me</a>")) == "XYZ9");
    CHECK(label_member(profile("p", "", "mmmglobal.example/u/BARE/")) == "BARE");
    // website first, then body
    CHECK(label_member(profile("p", "https://mmmglobal.example/u/BODY", "https://mmmglobal.example/u/SITE")) == "SITE");
    CHECK(label_member(profile("p", "www.mmmglobal.example/u/B", "https://other.example/")) == "B");
    // the match has no path
    CHECK_FALSE(label_member(profile("p", "https://mmmglobal.example")).has_value());
    CHECK(label_member(profile("p", "", "https://mmm-office.example/u/Q"), "mmm-office") == "Q");
    CHECK(find_urls("a https://x.org/b and www.y.com/c.").size() == 2);
}

TEST_CASE("tag labelling") {
    CHECK(label_tag({"a", "mmm indonesia", true}));
    CHECK_FALSE(label_tag({"a", "hmmmm", true}));
    CHECK_FALSE(label_tag({"a", "mmmm", true}));
    CHECK_FALSE(label_tag({"a", "mmm global", false}));
    CHECK_FALSE(label_tag({"a", "exchange", true}));
    CHECK(label_tag({"a", "MMM Global", true}));
    CHECK(label_tag({"a", "hmmmm", true}, {"mmm", {}}));
}

TEST_CASE("shared-address dedup") {
    CHECK(dedup_shared({}).empty());
    const std::vector<Candidate> c = {{"A", "x1", "m1"}, {"B", "x1", "m2"}, {"A", "x2", "m1"}, {"A", "x2", "m1"}};
    const auto out = dedup_shared(c);
    REQUIRE(out.size() == 1);
    CHECK(out[0].address == "x2");

    // order-insensitive and idempotent
    auto shuffled = c;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(dedup_shared(shuffled).size() == 1);
    CHECK(dedup_shared(out).size() == 1);
}

TEST_CASE("service-wallet filter") {
    const std::string g = addr(1), e = addr(2), u = addr(3);
    const WalletDirectory w({{g, "gm", WalletCategory::gambling}, {e, "ex", WalletCategory::exchanges}});
    const auto out = filter_service_addresses({testsupport::member(g), testsupport::member(e), testsupport::member(u)}, w);
    REQUIRE(out.size() == 2);
    CHECK(out[0].address == e);
    CHECK(out[1].address == u);
}

TEST_CASE("harvest run") {
    const std::string a1 = addr(1), a2 = addr(2), shared = addr(3), svc = addr(4), tagged = addr(5);
    std::vector<ProfileDoc> profiles = {
        profile("p1", "my wallet " + a1 + " and " + shared, "https://mmmglobal.example/u/M1"),
        profile("p2", "wallet " + shared + " / " + svc, "https://mmmglobal.example/u/M2"),
        profile("p3", "unlabelled " + a2),
    };
    profiles[0].country = "ID";
    profiles[0].registration_date = Date::parse("2015-10-01");
    const std::vector<TagDoc> tags = {
        {tagged, "mmm india", true},
        {a1, "mmm global", true},        // already a member
        {addr(6), "hmmmm", true},        // excluded label
        {"1notAnAddress", "mmm", true},  // invalid
    };
    const WalletDirectory w({{svc, "mx", WalletCategory::mixers}});
    const auto res = run(profiles, tags, w);
    CHECK(res.profiles == 3);
    CHECK(res.labelled_profiles == 2);
    CHECK(res.accepted_tags == 3);

    std::set<std::string> roster;
    for (const auto& m : res.roster) roster.insert(m.address);
    CHECK(roster == std::set<std::string>{a1, tagged});
    for (const auto& m : res.roster) {
        if (m.address == a1) {
            CHECK(m.member_id == "M1");
            CHECK(m.country == "ID");
            CHECK(m.registration_date == Date::parse("2015-10-01"));
        } else {
            CHECK(m.member_id == "tag:" + tagged);
        }
    }

    std::map<std::string, Reject> by_addr;
    for (const auto& r : res.rejects) by_addr.emplace(r.address, r);
    CHECK(by_addr.at(shared).reason == RejectReason::shared);
    CHECK(by_addr.at(shared).source == "p1;p2");
    CHECK(by_addr.at(svc).reason == RejectReason::service);
    CHECK(by_addr.at(svc).source == "p2");
    CHECK(by_addr.at(svc).detail == "mixers");
    CHECK(by_addr.at("1notAnAddress").reason == RejectReason::invalid);
    CHECK(rejects_csv(res.rejects).rfind("address,source,reason,detail\n", 0) == 0);
}

TEST_CASE("corpus loading") {
    TempDir dir;
    dir.write("alice.html", "<p>hello " + addr(1) + "</p>");
    dir.write("alice.meta.json",
              R"({"profile_id":"u-1","website_url":"https://mmmglobal.example/u/A1","country":"IN","age":31,"gender":"female","registration_date":"2015-09-30"})");
    dir.write("bob.txt", "no meta here");
    dir.write("bob.txt.meta.json", R"({"country":""})");
    const auto docs = load_corpus(dir.path);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].profile_id == "u-1");
    CHECK(docs[0].country == "IN");
    CHECK(docs[0].age == 31);
    CHECK(docs[0].gender == Gender::female);
    CHECK(label_member(docs[0]) == "A1");
    CHECK(docs[1].profile_id == "bob");
    CHECK_FALSE(docs[1].website_url.has_value());

    dir.write("carol.txt", "x");
    dir.write("carol.meta.json", R"({"country":"Narnia"})");
    CHECK_THROWS_AS(load_corpus(dir.path), InputError);
    dir.write("carol.meta.json", R"({"profile_id":"u-1"})");
    CHECK_THROWS_AS(load_corpus(dir.path), InputError);
    dir.write("carol.meta.json", "[");
    CHECK_THROWS_AS(load_corpus(dir.path), InputError);
    CHECK_THROWS_AS(load_corpus(dir.path / "missing"), InputError);
}

TEST_CASE("tags csv") {
    const auto tags = parse_tags("address,label,verified\nA,MMM Indonesia,true\nB,x,0\nC,y,\n", "t.csv");
    REQUIRE(tags.size() == 3);
    CHECK(tags[0].label == "mmm indonesia");
    CHECK(tags[0].verified);
    CHECK_FALSE(tags[1].verified);
    CHECK_THROWS_AS(parse_tags("address,label,verified\nA,x,maybe\n", "t.csv"), InputError);
    CHECK_THROWS_AS(parse_tags("address,label\nA,x\n", "t.csv"), InputError);
}
