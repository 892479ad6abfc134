#include "ponzi/pipeline.hpp"

#include "ponzi/csv.hpp"
#include "ponzi/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace ponzi::pipeline {

namespace fs = std::filesystem;

DatasetPaths DatasetPaths::from_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("dataset directory " + dir.string() + " does not exist");
    DatasetPaths p;
    p.transactions = (dir / "transactions.ndjson").string();
    p.roster = (dir / "roster.csv").string();
    p.prices = (dir / "prices.csv").string();
    if (fs::exists(dir / "wallets.csv")) p.wallets = (dir / "wallets.csv").string();
    return p;
}

Loaded load(const DatasetPaths& paths, const LoadOptions& opts) {
    for (const auto* p : {&paths.transactions, &paths.roster, &paths.prices})
        if (p->empty()) throw InputError("transactions, roster and prices inputs are required");
    auto txs = load_transactions(paths.transactions);
    auto roster = load_roster(paths.roster);
    WalletDirectory wallets = paths.wallets.empty() ? WalletDirectory{} : load_wallets(paths.wallets);
    PriceTable prices = load_prices(paths.prices);
    Loaded out;
    out.dataset = build_dataset(txs, std::move(roster), std::move(wallets), std::move(prices), opts.window, opts.clean,
                                &out.report);
    return out;
}

WindowSpec parse_window(std::string_view text, double coverage) {
    if (text.empty() || text == "auto") return WindowSpec::automatic(coverage);
    if (text == "all") return WindowSpec::everything();
    return WindowSpec::exactly(DayRange::parse(text));
}

std::vector<phases::Volume> volume_series(const SchemeDataset& ds) {
    std::vector<phases::Volume> v(ds.day_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<phases::Volume>(ds.on_day(i).size());
    return v;
}

PhaseResult detect_phases(const SchemeDataset& ds, phases::ScanMode scan) {
    const auto vols = volume_series(ds);
    PhaseResult r;
    r.partition = phases::partition(vols, {scan});
    r.origin = ds.window().first;
    const auto& h = r.partition.hyperoperation;
    r.hyperoperation = {r.origin + static_cast<std::int32_t>(h.starts), r.origin + static_cast<std::int32_t>(h.ends)};
    r.json = phases::to_json(r.partition, r.origin);
    return r;
}

DayRange hyper_range_from_file(const std::string& path, const SchemeDataset& ds) {
    const auto dates = phases::parse_phase_dates(read_file(path));
    const DayRange r{dates.hyper_start, dates.hyper_end};
    if (r.last < r.first) throw InputError(path + ": hyperoperation ends before it starts");
    if (!ds.window().contains(r.first) || !ds.window().contains(r.last))
        throw InputError(path + ": hyperoperation " + r.str() + " lies outside the dataset window " + ds.window().str());
    return r;
}

void write_outputs(const fs::path& out_dir, const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    std::random_device rd;
    const fs::path staging = out_dir / (".staging-" + std::to_string(rd()));
    fs::create_directory(staging, ec);
    if (ec) throw InputError("cannot create staging directory in " + out_dir.string() + ": " + ec.message());
    try {
        for (const auto& [name, content] : files) {
            std::ofstream f(staging / name, std::ios::binary);
            f.write(content.data(), static_cast<std::streamsize>(content.size()));
            f.close();
            if (!f) throw InputError("failed writing " + (out_dir / name).string());
        }
        for (const auto& [name, content] : files) fs::rename(staging / name, out_dir / name);
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
    fs::remove_all(staging, ec);
}

namespace {

std::string md_table(const csv::Table& t, std::size_t max_rows) {
    std::string out = "|";
    for (const auto& h : t.header()) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < t.header().size(); ++i) out += " --- |";
    out += "\n";
    const std::size_t n = std::min(max_rows, t.rows());
    for (std::size_t i = 0; i < n; ++i) {
        out += "|";
        for (const auto& f : t.row(i)) out += " " + f + " |";
        out += "\n";
    }
    if (t.rows() > n) out += "\n_" + std::to_string(t.rows() - n) + " more rows omitted._\n";
    return out;
}

// "-12.34" -> -1234
std::int64_t parse_cents(const std::string& s) {
    if (s.empty()) return 0;
    const bool neg = s[0] == '-';
    std::int64_t whole = 0, frac = 0;
    std::size_t i = neg ? 1 : 0;
    for (; i < s.size() && s[i] != '.'; ++i) whole = whole * 10 + (s[i] - '0');
    int digits = 0;
    for (++i; i < s.size() && digits < 2; ++i, ++digits) frac = frac * 10 + (s[i] - '0');
    while (digits++ < 2) frac *= 10;
    const std::int64_t v = whole * 100 + frac;
    return neg ? -v : v;
}

}  // namespace

std::string render_report(const fs::path& dir, std::size_t max_rows) {
    if (!fs::is_directory(dir)) throw InputError("report input directory " + dir.string() + " does not exist");
    auto has = [&](const char* name) { return fs::exists(dir / name); };
    auto path = [&](const char* name) { return (dir / name).string(); };
    std::ostringstream md;
    md << "# Ponzi scheme analysis report\n";
    bool any = false;

    if (has("harvest_summary.json")) {
        any = true;
        const auto j = nlohmann::json::parse(read_file(path("harvest_summary.json")));
        md << "\n## Roster harvest\n\n| field | value |\n| --- | --- |\n";
        for (const auto& [k, v] : j.items()) md << "| " << k << " | " << v.dump() << " |\n";
    }
    if (has("cleaning_report.json")) {
        any = true;
        const auto j = nlohmann::json::parse(read_file(path("cleaning_report.json")));
        md << "\n## Transaction typing and cleaning\n\n| field | value |\n| --- | --- |\n";
        for (const auto& [k, v] : j.items()) md << "| " << k << " | " << (v.is_string() ? v.get<std::string>() : v.dump()) << " |\n";
    }
    if (has("phases.json")) {
        any = true;
        const auto j = nlohmann::json::parse(read_file(path("phases.json")));
        const auto& h = j.at("hyperoperation");
        md << "\n## Lifecycle phases\n\n";
        auto span = [](const nlohmann::json& s) {
            return s.is_null() ? std::string("none") : s.at("starts").get<std::string>() + " .. " + s.at("ends").get<std::string>();
        };
        md << "- bootstrap: " << span(j.at("bootstrap")) << "\n";
        md << "- hyperoperation: " << h.at("starts").get<std::string>() << " .. " << h.at("ends").get<std::string>() << "\n";
        md << "- collapse: " << span(j.at("collapse")) << "\n\n";
        md << "| cycle | starts | ends | peak day | peak DTV | factor |\n| --- | --- | --- | --- | --- | --- |\n";
        int i = 1;
        for (const auto& c : h.at("cycles"))
            md << "| " << i++ << " | " << c.at("starts").get<std::string>() << " | " << c.at("ends").get<std::string>()
               << " | " << c.at("peak_day").get<std::string>() << " | " << c.at("peak_vol").dump() << " | "
               << c.at("factor").get<std::string>() << " |\n";
    }
    if (has("daily.csv")) {
        any = true;
        const auto t = csv::Table::read_file(path("daily.csv"));
        const auto c_day = t.column("day"), c_dtv = t.column("dtv"), c_dnd = t.column("dnd");
        std::int64_t dnd = 0, abs_dnd = 0, best = -1;
        std::string best_day;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const auto v = parse_cents(t.row(i)[c_dnd]);
            dnd += v;
            abs_dnd += v < 0 ? -v : v;
            const auto vol = std::stoll(t.row(i)[c_dtv]);
            if (vol > best) best = vol, best_day = t.row(i)[c_day];
        }
        md << "\n## Daily metrics\n\n| field | value |\n| --- | --- |\n";
        md << "| days | " << t.rows() << " |\n| max DTV | " << best << " on " << best_day << " |\n";
        md << "| total DND (USD) | " << format_hundredths(dnd) << " |\n| total abs DND (USD) | " << format_hundredths(abs_dnd) << " |\n";
    }
    if (has("scammers.csv")) {
        any = true;
        md << "\n## Likely scammers\n\n" << md_table(csv::Table::read_file(path("scammers.csv")), max_rows);
    }
    if (has("victims.csv")) {
        any = true;
        const auto t = csv::Table::read_file(path("victims.csv"));
        md << "\n## Victims\n\n";
        if (t.rows() > 0) {
            const auto& last = t.row(t.rows() - 1);
            md << "Final CVR " << (last[t.column("cvr")].empty() ? "undefined" : last[t.column("cvr")]) << " on "
               << last[t.column("day")] << " (" << last[t.column("victim_count")] << " of " << last[t.column("active_count")]
               << " active addresses).\n";
        }
    }
    if (has("shares.csv")) {
        any = true;
        md << "\n## External service shares\n\n" << md_table(csv::Table::read_file(path("shares.csv")), max_rows);
    }
    if (has("geo.json")) {
        any = true;
        const auto j = nlohmann::json::parse(read_file(path("geo.json")));
        md << "\n## Geopolitical network\n\n" << j.at("nodes").size() << " countries, " << j.at("edges").size() << " edges.\n\n";
        md << "| from | to | usd |\n| --- | --- | --- |\n";
        std::size_t n = 0;
        for (const auto& e : j.at("edges")) {
            if (n++ == max_rows) break;
            md << "| " << e.at("from").get<std::string>() << " | " << e.at("to").get<std::string>() << " | "
               << e.at("usd").get<std::string>() << " |\n";
        }
    }
    if (!any) throw InputError("no analysis artifacts found in " + dir.string());
    return md.str();
}

}  // namespace ponzi::pipeline
