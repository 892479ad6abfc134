#include "ponzi/harvest.hpp"

#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <unordered_set>

namespace ponzi::harvest {

namespace fs = std::filesystem;

std::vector<Extracted> extract_addresses(std::string_view text, bool verify_checksum) {
    std::vector<Extracted> out;
    std::unordered_set<std::string> seen;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_address_alphabet(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_address_alphabet(text[j])) ++j;
        const std::string_view token = text.substr(i, j - i);
        i = j;
        if (token.size() < 14 || token.size() > 90) continue;
        const auto kind = match_address(token);
        if (!kind) continue;
        if (verify_checksum && !checksum_valid(token, *kind)) continue;
        if (seen.emplace(token).second) out.push_back({std::string(token), *kind});
    }
    return out;
}

std::vector<std::string> find_urls(std::string_view text) {
    static const std::regex url_re(R"((?:https?://|www\.)[^\s"'<>()\[\]{}]+)", std::regex::icase);
    std::vector<std::string> out;
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), url_re); it != std::sregex_iterator(); ++it)
        out.push_back(it->str());
    return out;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<std::string> member_from_url(const std::string& url, std::string_view marker) {
    const auto pos = lower(url).find(lower(marker));
    if (pos == std::string::npos) return std::nullopt;
    std::string rest = url.substr(pos + marker.size());
    if (const auto cut = rest.find_first_of("?#"); cut != std::string::npos) rest.resize(cut);
    const auto slash = rest.find('/');
    if (slash == std::string::npos) return std::nullopt;
    rest = rest.substr(slash + 1);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    if (rest.empty()) return std::nullopt;
    const auto last = rest.rfind('/');
    return last == std::string::npos ? rest : rest.substr(last + 1);
}

std::string meta_string(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_string()) throw InputError(where + ": field '" + key + "' must be a string");
    return j[key].get<std::string>();
}

}  // namespace

std::optional<std::string> label_member(const ProfileDoc& profile, std::string_view marker) {
    std::vector<std::string> urls;
    if (profile.website_url && !profile.website_url->empty()) {
        auto found = find_urls(*profile.website_url);
        // a bare host such as "mmmglobal.example/u/1" is still a link
        if (found.empty()) found.push_back(*profile.website_url);
        urls.insert(urls.end(), found.begin(), found.end());
    }
    for (auto& u : find_urls(profile.body)) urls.push_back(std::move(u));
    for (const auto& u : urls)
        if (lower(u).find(lower(marker)) != std::string::npos) return member_from_url(u, marker);
    return std::nullopt;
}

bool label_tag(const TagDoc& tag, const TagRules& rules) {
    if (!tag.verified) return false;
    const std::string label = lower(tag.label);
    if (label.find(lower(rules.marker)) == std::string::npos) return false;
    for (const auto& pattern : rules.exclusions)
        if (std::regex_search(label, std::regex(pattern))) return false;
    return true;
}

std::vector<Candidate> dedup_shared(const std::vector<Candidate>& candidates) {
    std::map<std::string, std::set<std::string>> claimants;
    for (const auto& c : candidates) claimants[c.address].insert(c.profile_id);
    std::map<std::string, Candidate> kept;
    for (const auto& c : candidates) {
        if (claimants[c.address].size() != 1) continue;
        kept.emplace(c.address, c);
    }
    std::vector<Candidate> out;
    for (auto& [addr, c] : kept) out.push_back(std::move(c));
    return out;
}

std::vector<MemberRecord> filter_service_addresses(const std::vector<MemberRecord>& rows,
                                                   const WalletDirectory& wallets) {
    std::vector<MemberRecord> out;
    for (const auto& r : rows) {
        const auto cat = wallets.category(r.address);
        if (cat == WalletCategory::unknown || cat == WalletCategory::exchanges) out.push_back(r);
    }
    return out;
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::shared: return "shared";
        case RejectReason::service: return "service";
        case RejectReason::invalid: return "invalid";
    }
    return "?";
}

std::vector<ProfileDoc> load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("corpus directory " + dir.string() + " does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.size() >= 10 && name.ends_with(".meta.json")) continue;
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<ProfileDoc> docs;
    std::set<std::string> ids;
    for (const auto& f : files) {
        ProfileDoc d;
        d.profile_id = f.stem().string();
        d.body = read_file(f.string());
        fs::path meta = f;
        meta += ".meta.json";
        if (!fs::exists(meta)) meta = f.parent_path() / (f.stem().string() + ".meta.json");
        if (fs::exists(meta)) {
            const std::string where = meta.string();
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(where));
            } catch (const nlohmann::json::exception& e) {
                throw InputError(where + ": " + e.what());
            }
            if (!j.is_object()) throw InputError(where + ": sidecar must be a JSON object");
            try {
                if (auto id = meta_string(j, "profile_id", where); !id.empty()) d.profile_id = id;
                if (auto url = meta_string(j, "website_url", where); !url.empty()) d.website_url = url;
                if (auto s = meta_string(j, "registration_date", where); !s.empty()) d.registration_date = Date::parse(s);
                if (auto s = meta_string(j, "last_active", where); !s.empty()) d.last_active = Date::parse(s);
                d.country = meta_string(j, "country", where);
                if (!d.country.empty() && !is_iso_country(d.country))
                    throw InputError("invalid country code '" + d.country + "'");
                d.gender = parse_gender(meta_string(j, "gender", where));
                if (j.contains("age") && !j["age"].is_null()) {
                    if (!j["age"].is_number_integer()) throw InputError("age must be an integer");
                    d.age = j["age"].get<int>();
                }
            } catch (const InputError& e) {
                if (std::string(e.what()).starts_with(where)) throw;
                throw InputError(where + ": " + e.what());
            }
        }
        if (!ids.insert(d.profile_id).second) throw InputError("duplicate profile id '" + d.profile_id + "' in corpus");
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<TagDoc> parse_tags(std::string_view csv_text, const std::string& source) {
    const auto table = csv::Table::parse(csv_text, source);
    table.require_columns({"address", "label", "verified"});
    const auto c_addr = table.column("address");
    const auto c_label = table.column("label");
    const auto c_ver = table.column("verified");
    std::vector<TagDoc> out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& r = table.row(i);
        TagDoc t{r[c_addr], lower(r[c_label]), false};
        const std::string v = lower(r[c_ver]);
        if (v == "true" || v == "1" || v == "yes")
            t.verified = true;
        else if (!(v == "false" || v == "0" || v == "no" || v.empty()))
            throw InputError(source + ":" + std::to_string(table.line_of(i)) + ": bad verified flag '" + r[c_ver] + "'");
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TagDoc> load_tags(const std::string& path) { return parse_tags(read_file(path), path); }

HarvestResult run(const std::vector<ProfileDoc>& profiles, const std::vector<TagDoc>& tags,
                  const WalletDirectory& wallets, const HarvestOptions& opts) {
    HarvestResult res;
    res.profiles = profiles.size();

    std::map<std::string, const ProfileDoc*> by_id;
    std::vector<Candidate> candidates;
    for (const auto& p : profiles) {
        const auto member = label_member(p, opts.member_marker);
        if (!member) continue;
        ++res.labelled_profiles;
        by_id[p.profile_id] = &p;
        for (const auto& x : extract_addresses(p.body)) {
            if (opts.verify_checksum && !checksum_valid(x.address, x.kind)) {
                res.rejects.push_back({x.address, p.profile_id, RejectReason::invalid, "checksum"});
                continue;
            }
            candidates.push_back({p.profile_id, x.address, *member});
        }
    }

    std::map<std::string, std::set<std::string>> claimants;
    for (const auto& c : candidates) claimants[c.address].insert(c.profile_id);
    for (const auto& [addr, who] : claimants) {
        if (who.size() < 2) continue;
        std::string joined;
        for (const auto& w : who) joined += (joined.empty() ? "" : ";") + w;
        res.rejects.push_back({addr, joined, RejectReason::shared, std::to_string(who.size()) + " profiles"});
    }

    std::vector<MemberRecord> rows;
    std::set<std::string> taken;
    std::map<std::string, std::string> source_of;
    for (const auto& c : dedup_shared(candidates)) {
        const ProfileDoc& p = *by_id.at(c.profile_id);
        MemberRecord m;
        m.address = c.address;
        m.member_id = c.member_id;
        m.country = p.country;
        m.registration_date = p.registration_date;
        m.age = p.age;
        m.gender = p.gender;
        taken.insert(m.address);
        source_of[m.address] = c.profile_id;
        rows.push_back(std::move(m));
    }

    for (const auto& t : tags) {
        if (!label_tag(t, opts.tags)) continue;
        ++res.accepted_tags;
        if (taken.count(t.address) || claimants.count(t.address)) continue;
        const auto kind = match_address(t.address);
        if (!kind || (opts.verify_checksum && !checksum_valid(t.address, *kind))) {
            res.rejects.push_back({t.address, "tag", RejectReason::invalid, kind ? "checksum" : "pattern"});
            taken.insert(t.address);
            continue;
        }
        MemberRecord m;
        m.address = t.address;
        m.member_id = "tag:" + t.address;
        taken.insert(m.address);
        rows.push_back(std::move(m));
    }

    std::set<std::string> kept;
    for (auto& m : filter_service_addresses(rows, wallets)) kept.insert(m.address);
    for (auto& m : rows) {
        if (kept.count(m.address)) {
            res.roster.push_back(std::move(m));
        } else {
            const auto src = source_of.find(m.address);
            res.rejects.push_back({m.address, src == source_of.end() ? "tag" : src->second,
                                   RejectReason::service, std::string(to_string(wallets.category(m.address)))});
        }
    }
    std::sort(res.roster.begin(), res.roster.end(),
              [](const MemberRecord& a, const MemberRecord& b) { return a.address < b.address; });
    std::sort(res.rejects.begin(), res.rejects.end(), [](const Reject& a, const Reject& b) {
        return a.address != b.address ? a.address < b.address : a.source < b.source;
    });
    return res;
}

std::string rejects_csv(const std::vector<Reject>& rejects) {
    std::string out = "address,source,reason,detail\n";
    for (const auto& r : rejects) csv::append_row(out, {r.address, r.source, std::string(to_string(r.reason)), r.detail});
    return out;
}

}  // namespace ponzi::harvest
