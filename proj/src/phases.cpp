#include "ponzi/phases.hpp"

#include "ponzi/errors.hpp"
#include "ponzi/money.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <numeric>

namespace ponzi::phases {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// vol <= peak / factor, exactly
bool below_threshold(Volume vol, Volume peak, Factor f) {
    return static_cast<__int128>(vol) * f.num <= static_cast<__int128>(peak) * f.den;
}

void check_range(std::span<const Volume> vols, Day start_day, Day end_day) {
    const Day n = static_cast<Day>(vols.size()) - 1;
    if (start_day < 0 || start_day > end_day || end_day > n)
        throw InvariantError("cycle search range [" + std::to_string(start_day) + ", " + std::to_string(end_day) +
                             "] outside the series");
}

}  // namespace

Factor Factor::make(__int128 num, __int128 den) {
    if (den == 0 || num <= 0 || den < 0) throw InvariantError("growth factor must be a positive rational");
    const __int128 g = gcd128(num, den);
    num /= g;
    den /= g;
    if (num > INT64_MAX || den > INT64_MAX) throw InvariantError("growth factor overflow");
    return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::string Factor::decimal() const {
    const std::int64_t scaled = round_half_even(static_cast<__int128>(num) * 1'000'000, den);
    std::string s = std::to_string(scaled / 1'000'000);
    std::string frac = std::to_string(scaled % 1'000'000);
    frac.insert(0, 6 - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) s += "." + frac;
    return s;
}

std::string Factor::exact() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::pair<Volume, Day> get_peak(std::span<const Volume> vols, Day start_day, Day end_day) {
    Volume peak_vol = 0;
    Day peak_day = start_day;
    for (Day day = start_day; day < end_day; ++day) {
        const Volume v = vols[static_cast<std::size_t>(day)];
        if (v > peak_vol) {
            peak_vol = v;
            peak_day = day;
        }
    }
    return {peak_vol, peak_day};
}

Factor get_factor(const Cycle* reference, Volume peak_vol) {
    if (reference == nullptr) return {10, 1};
    if (reference->peak_vol == 0) throw InputError("growth factor undefined: previous cycle has a zero peak");
    const __int128 num = static_cast<__int128>(reference->factor.num) * peak_vol;
    const __int128 den = static_cast<__int128>(reference->factor.den) * reference->peak_vol;
    if (num <= den) return {1, 1};
    return Factor::make(num, den);
}

Cycle get_cycle(std::span<const Volume> vols, const Cycle* reference, Day start_day, Day end_day, Direction direction,
                ScanMode scan) {
    check_range(vols, start_day, end_day);
    const auto [peak_vol, peak_day] = get_peak(vols, start_day, end_day);
    Cycle c;
    c.peak_vol = peak_vol;
    c.peak_day = peak_day;
    c.factor = get_factor(reference, peak_vol);
    c.starts = start_day;
    c.ends = end_day;

    for (Day day = peak_day; day > start_day; --day) {
        if (below_threshold(vols[static_cast<std::size_t>(day - 1)], peak_vol, c.factor)) {
            c.starts = day - 1;
            if (scan == ScanMode::nearest) break;
        }
    }
    for (Day day = peak_day; day < end_day; ++day) {
        if (below_threshold(vols[static_cast<std::size_t>(day + 1)], peak_vol, c.factor)) {
            c.ends = day + 1;
            if (scan == ScanMode::nearest) break;
        }
    }
    if (reference != nullptr) {
        if (direction == Direction::after)
            c.starts = std::max(c.starts, reference->ends);
        else
            c.ends = std::min(c.ends, reference->starts);
    }
    c.duration = c.ends - c.starts;
    return c;
}

bool valid_cycle(const Cycle& cycle, const Cycle& reference) {
    if (cycle.peak_vol <= 0) return false;
    // duration >= ref.duration / factor
    const bool valid_low = static_cast<__int128>(cycle.duration) * cycle.factor.num >=
                           static_cast<__int128>(reference.duration) * cycle.factor.den;
    const bool valid_high = cycle.duration < reference.duration;
    return valid_low && valid_high;
}

Phase get_phase(std::span<const Volume> vols, Options opts) {
    if (vols.empty()) throw InputError("volume series is empty");
    for (auto v : vols)
        if (v < 0) throw InputError("volume series contains a negative count");
    const Day end_day = static_cast<Day>(vols.size()) - 1;

    std::deque<Cycle> cycles;
    cycles.push_back(get_cycle(vols, nullptr, 0, end_day, Direction::after, opts.scan));
    if (cycles.front().peak_vol == 0) throw InputError("volume series has no peak");

    while (true) {
        const Cycle ref = cycles.front();
        Cycle c = get_cycle(vols, &ref, 0, ref.starts, Direction::before, opts.scan);
        if (!valid_cycle(c, ref)) break;
        cycles.push_front(c);
    }
    while (true) {
        const Cycle ref = cycles.back();
        Cycle c = get_cycle(vols, &ref, ref.ends, end_day, Direction::after, opts.scan);
        if (!valid_cycle(c, ref)) break;
        cycles.push_back(c);
    }

    Phase p;
    p.cycles.assign(cycles.begin(), cycles.end());
    p.starts = p.cycles.front().starts;
    p.ends = p.cycles.back().ends;
    return p;
}

Partition partition(std::span<const Volume> vols, Options opts) {
    Partition part;
    part.hyperoperation = get_phase(vols, opts);
    const Day n = static_cast<Day>(vols.size()) - 1;
    part.bootstrap = {0, part.hyperoperation.starts};
    part.collapse = {part.hyperoperation.ends + 1, n + 1};
    return part;
}

std::string to_json(const Partition& p, Date origin) {
    using nlohmann::ordered_json;
    auto date = [&](Day d) { return (origin + static_cast<std::int32_t>(d)).str(); };
    auto range = [&](Span s) -> ordered_json {
        if (s.empty()) return nullptr;
        return ordered_json{{"starts", date(s.begin)}, {"ends", date(s.end - 1)}};
    };
    ordered_json j;
    j["origin"] = origin.str();
    j["bootstrap"] = range(p.bootstrap);
    ordered_json h;
    h["starts"] = date(p.hyperoperation.starts);
    h["ends"] = date(p.hyperoperation.ends);
    h["cycles"] = ordered_json::array();
    for (const auto& c : p.hyperoperation.cycles) {
        h["cycles"].push_back(ordered_json{{"starts", date(c.starts)},
                                           {"ends", date(c.ends)},
                                           {"peak_day", date(c.peak_day)},
                                           {"peak_vol", c.peak_vol},
                                           {"duration", c.duration},
                                           {"factor", c.factor.decimal()},
                                           {"factor_exact", c.factor.exact()}});
    }
    j["hyperoperation"] = h;
    j["collapse"] = range(p.collapse);
    return j.dump(2) + "\n";
}

PhaseDates parse_phase_dates(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
        PhaseDates out;
        const auto& h = j.at("hyperoperation");
        out.hyper_start = Date::parse(h.at("starts").get<std::string>());
        out.hyper_end = Date::parse(h.at("ends").get<std::string>());
        for (const auto& c : h.at("cycles")) out.peak_days.push_back(Date::parse(c.at("peak_day").get<std::string>()));
        if (!j.at("bootstrap").is_null()) {
            out.has_bootstrap = true;
            out.bootstrap_start = Date::parse(j["bootstrap"].at("starts").get<std::string>());
            out.bootstrap_end = Date::parse(j["bootstrap"].at("ends").get<std::string>());
        }
        if (!j.at("collapse").is_null()) {
            out.has_collapse = true;
            out.collapse_start = Date::parse(j["collapse"].at("starts").get<std::string>());
            out.collapse_end = Date::parse(j["collapse"].at("ends").get<std::string>());
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed phases JSON: ") + e.what());
    }
}

}  // namespace ponzi::phases
