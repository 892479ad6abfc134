#pragma once

// Address extraction from local profile corpora, membership labelling and
// the roster filters (shared addresses, service wallets).

#include "ponzi/address.hpp"
#include "ponzi/coredata.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ponzi::harvest {

struct Extracted {
    std::string address;
    AddressKind kind;
    friend bool operator==(const Extracted&, const Extracted&) = default;
};

/// Address-alphabet tokens that fully match one of the address patterns, in
/// text order, first occurrence only. With `verify_checksum` set, tokens with
/// a bad checksum are skipped.
std::vector<Extracted> extract_addresses(std::string_view text, bool verify_checksum = false);

struct ProfileDoc {
    std::string profile_id;
    std::string body;
    std::optional<std::string> website_url;
    std::optional<Date> registration_date;
    std::optional<Date> last_active;
    std::string country;
    std::optional<int> age;
    Gender gender = Gender::unspecified;
};

/// URLs in `text` (http, https or www.), in order of appearance.
std::vector<std::string> find_urls(std::string_view text);

/// Member id from the first URL (website field first, then the body) that
/// contains `marker`: the last non-empty path segment after the match,
/// ignoring query and fragment.
std::optional<std::string> label_member(const ProfileDoc& profile, std::string_view marker = "mmmglobal");

struct TagDoc {
    std::string address;
    std::string label;
    bool verified = false;
};

struct TagRules {
    std::string marker = "mmm";
    /// ECMAScript regexes searched in the label; any hit rejects the tag.
    std::vector<std::string> exclusions = {"h+m{2,}", "m{4,}"};
};

bool label_tag(const TagDoc& tag, const TagRules& rules = {});

struct Candidate {
    std::string profile_id;
    std::string address;
    std::string member_id;
};

/// Drops every address claimed by two or more distinct profiles. The result
/// holds one candidate per address, sorted by address.
std::vector<Candidate> dedup_shared(const std::vector<Candidate>& candidates);

/// Keeps roster rows whose wallet category is unknown or exchanges.
std::vector<MemberRecord> filter_service_addresses(const std::vector<MemberRecord>& rows,
                                                   const WalletDirectory& wallets);

enum class RejectReason { shared, service, invalid };
std::string_view to_string(RejectReason r);

struct Reject {
    std::string address;
    std::string source;  // profile id, or "tag"
    RejectReason reason;
    std::string detail;
};

struct HarvestOptions {
    std::string member_marker = "mmmglobal";
    TagRules tags;
    bool verify_checksum = false;
};

struct HarvestResult {
    std::vector<MemberRecord> roster;
    std::vector<Reject> rejects;
    std::size_t profiles = 0;
    std::size_t labelled_profiles = 0;
    std::size_t accepted_tags = 0;
};

/// Reads a corpus directory: each regular file is one profile document, with
/// optional "<file>.meta.json" or "<stem>.meta.json" sidecar holding
/// profile_id, website_url, registration_date, last_active, country, age, gender.
std::vector<ProfileDoc> load_corpus(const std::filesystem::path& dir);

/// Tags CSV with header address,label,verified.
std::vector<TagDoc> parse_tags(std::string_view csv_text, const std::string& source);
std::vector<TagDoc> load_tags(const std::string& path);

HarvestResult run(const std::vector<ProfileDoc>& profiles, const std::vector<TagDoc>& tags,
                  const WalletDirectory& wallets, const HarvestOptions& opts = {});

std::string rejects_csv(const std::vector<Reject>& rejects);

}  // namespace ponzi::harvest
