// ponzi: command-line front end for the forensics pipeline.

#include "ponzi/classify.hpp"
#include "ponzi/errors.hpp"
#include "ponzi/flows.hpp"
#include "ponzi/harvest.hpp"
#include "ponzi/metrics.hpp"
#include "ponzi/pipeline.hpp"
#include "ponzi/simgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace ponzi;
using Files = std::vector<std::pair<std::string, std::string>>;

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level log_level() {
    const char* env = std::getenv("PONZI_LOG_LEVEL");
    const std::string v = env ? env : "";
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

void log(Level l, const std::string& msg) {
    static const Level threshold = log_level();
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= threshold) std::cerr << "[" << names[static_cast<int>(l)] << "] " << msg << "\n";
}

int fail(const char* kind, const std::string& message, int code) {
    nlohmann::ordered_json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    return code;
}

struct Options {
    std::string out = ".";
    std::string day_range = "auto";
    double coverage = 0.98;
    std::string format = "csv";

    std::string dataset, tx, roster, wallets, prices;
    bool single_pass_clean = false;
    bool literal_scan = false;
    bool all_roster_gini = false;
    bool all_roster_cvr = false;
    bool value_weighted_shares = false;
    bool full_months = false;
    bool include_self_loops = false;
    std::string phases_file;
    std::size_t top_k = 10;
    std::vector<std::string> pairs;

    std::string corpus, tags, marker = "mmmglobal", tag_marker = "mmm";
    std::vector<std::string> exclusions;
    bool exclusions_set = false;
    bool verify_checksum = false;

    std::string scenario;
    std::optional<std::uint64_t> seed;

    std::string report_from;
};

pipeline::DatasetPaths dataset_paths(const Options& o) {
    pipeline::DatasetPaths p;
    if (!o.dataset.empty()) p = pipeline::DatasetPaths::from_dir(o.dataset);
    if (!o.tx.empty()) p.transactions = o.tx;
    if (!o.roster.empty()) p.roster = o.roster;
    if (!o.wallets.empty()) p.wallets = o.wallets;
    if (!o.prices.empty()) p.prices = o.prices;
    if (p.transactions.empty() || p.roster.empty() || p.prices.empty())
        throw InputError("give --dataset DIR or all of --tx, --roster and --prices");
    return p;
}

pipeline::Loaded load(const Options& o) {
    pipeline::LoadOptions lo;
    lo.window = pipeline::parse_window(o.day_range, o.coverage);
    lo.clean = o.single_pass_clean ? txclass::CleanMode::single_pass : txclass::CleanMode::fixpoint;
    auto loaded = pipeline::load(dataset_paths(o), lo);
    log(Level::info, "dataset window " + loaded.dataset.window().str() + ", " +
                         std::to_string(loaded.dataset.transactions().size()) + " typed transactions");
    return loaded;
}

phases::ScanMode scan_mode(const Options& o) {
    return o.literal_scan ? phases::ScanMode::literal : phases::ScanMode::nearest;
}

DayRange hyper_range(const Options& o, const SchemeDataset& ds) {
    if (!o.phases_file.empty()) return pipeline::hyper_range_from_file(o.phases_file, ds);
    return pipeline::detect_phases(ds, scan_mode(o)).hyperoperation;
}

bool as_json(const Options& o) { return o.format == "json"; }

Files cmd_harvest(const Options& o) {
    if (o.corpus.empty()) throw InputError("harvest needs --corpus DIR");
    harvest::HarvestOptions ho;
    ho.member_marker = o.marker;
    ho.tags.marker = o.tag_marker;
    if (o.exclusions_set) ho.tags.exclusions = o.exclusions;
    ho.verify_checksum = o.verify_checksum;
    const auto profiles = harvest::load_corpus(o.corpus);
    const auto tags = o.tags.empty() ? std::vector<harvest::TagDoc>{} : harvest::load_tags(o.tags);
    const WalletDirectory wallets = o.wallets.empty() ? WalletDirectory{} : load_wallets(o.wallets);
    const auto res = harvest::run(profiles, tags, wallets, ho);
    nlohmann::ordered_json summary{{"profiles", res.profiles},
                                   {"labelled_profiles", res.labelled_profiles},
                                   {"accepted_tags", res.accepted_tags},
                                   {"roster_addresses", res.roster.size()},
                                   {"rejects", res.rejects.size()}};
    return {{"roster.csv", roster_csv(res.roster)},
            {"rejects.csv", harvest::rejects_csv(res.rejects)},
            {"harvest_summary.json", summary.dump(2) + "\n"}};
}

Files cmd_ingest(const Options& o) {
    const auto loaded = load(o);
    auto report = nlohmann::ordered_json::parse(loaded.report.cleaning.to_json());
    report["window"] = loaded.dataset.window().str();
    report["outside_window"] = loaded.report.outside_window;
    report["in_window"] = loaded.dataset.transactions().size();
    return {{"typed.ndjson", txclass::typed_ndjson(loaded.dataset.transactions())},
            {"cleaning_report.json", report.dump(2) + "\n"}};
}

Files cmd_metrics(const Options& o) {
    const auto loaded = load(o);
    const auto& ds = loaded.dataset;
    metrics::DailyOptions dopt;
    if (o.all_roster_gini) dopt.gini_population = metrics::GiniPopulation::all_roster;
    const auto rows = metrics::daily_metrics(ds, dopt);
    const DayRange span = hyper_range(o, ds);
    const metrics::NetWorthLedger ledger(ds, span,
                                         o.all_roster_cvr ? metrics::CvrDenominator::all_roster : metrics::CvrDenominator::active);
    Files files;
    if (as_json(o))
        files.emplace_back("daily.json", metrics::daily_json(rows));
    else
        files.emplace_back("daily.csv", metrics::daily_csv(rows));
    files.emplace_back("ledger.csv", ledger.csv());
    return files;
}

Files cmd_phases(const Options& o) {
    const auto loaded = load(o);
    const auto r = pipeline::detect_phases(loaded.dataset, scan_mode(o));
    log(Level::info, "hyperoperation " + r.hyperoperation.str());
    return {{"phases.json", r.json}};
}

Files cmd_classify(const Options& o) {
    const auto loaded = load(o);
    const auto& ds = loaded.dataset;
    const DayRange span = hyper_range(o, ds);
    const metrics::NetWorthLedger ledger(ds, span,
                                         o.all_roster_cvr ? metrics::CvrDenominator::all_roster : metrics::CvrDenominator::active);
    const auto search = classify::likely_scammers(ledger, {o.top_k, o.full_months});
    const auto rows = classify::scammer_report(ds, ledger, search.scammers);

    nlohmann::ordered_json monthly = nlohmann::ordered_json::object();
    for (const auto& [month, members] : search.monthly) monthly[month] = members;
    nlohmann::ordered_json j{{"hyperoperation", span.str()},
                             {"top_k", o.top_k},
                             {"likely_scammers", search.scammers},
                             {"monthly_top", monthly}};
    Files files;
    if (as_json(o)) {
        files.emplace_back("scammers.json", classify::scammers_json(rows));
        files.emplace_back("victims.json", classify::victims_json(ledger.cvr_series()));
    } else {
        files.emplace_back("scammers.csv", classify::scammers_csv(rows));
        files.emplace_back("victims.csv", classify::victims_csv(ledger.cvr_series()));
    }
    files.emplace_back("scammer_search.json", j.dump(2) + "\n");
    return files;
}

Files cmd_flows(const Options& o) {
    const auto loaded = load(o);
    const auto& ds = loaded.dataset;
    const auto shares =
        flows::external_shares(ds, o.value_weighted_shares ? flows::ShareMode::value_weighted : flows::ShareMode::incidence);
    const auto geo = flows::build_geo_network(ds);
    Files files;
    if (as_json(o))
        files.emplace_back("shares.json", flows::shares_json(shares));
    else
        files.emplace_back("shares.csv", flows::shares_csv(shares));
    files.emplace_back("geo.dot", flows::geo_dot(geo, {o.include_self_loops}));
    files.emplace_back("geo.json", flows::geo_json(geo));
    if (!o.pairs.empty()) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& pair : o.pairs) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw InputError("--pair expects A:B, got '" + pair + "'");
            const std::string a = pair.substr(0, colon), b = pair.substr(colon + 1);
            const auto r = flows::asymmetry(geo, a, b);
            char ratio[32];
            if (r.ratio) std::snprintf(ratio, sizeof ratio, "%.6f", *r.ratio);
            arr.push_back({{"a", a},
                           {"b", b},
                           {"ratio", r.ratio ? nlohmann::ordered_json(ratio) : nlohmann::ordered_json(nullptr)},
                           {"usd_a_to_b", r.forward.str()},
                           {"usd_b_to_a", r.backward.str()}});
        }
        files.emplace_back("asymmetry.json", arr.dump(2) + "\n");
    }
    return files;
}

Files cmd_simulate(const Options& o) {
    simgen::SimConfig cfg;
    if (!o.scenario.empty()) cfg = simgen::SimConfig::from_json(read_file(o.scenario), o.scenario);
    if (o.seed) cfg.seed = *o.seed;
    const auto out = simgen::generate(cfg);
    log(Level::info, "generated " + std::to_string(out.transactions.size()) + " transactions");
    auto files = simgen::dataset_files(out, cfg);
    files.emplace_back("scenario.json", cfg.to_json());
    return files;
}

Files cmd_report(const Options& o) {
    return {{"report.md", pipeline::render_report(o.report_from.empty() ? o.out : o.report_from)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forensic analysis of Bitcoin Ponzi schemes", "ponzi"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option values");
    Options o;

    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--day-range", o.day_range, "Analysis window: A..B, all or auto")->capture_default_str();
    app.add_option("--coverage", o.coverage, "Share of transaction days kept by the auto window")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--format", o.format, "Table output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--dataset", o.dataset, "Directory with transactions.ndjson, roster.csv, wallets.csv, prices.csv");
    app.add_option("--tx", o.tx, "Transactions NDJSON");
    app.add_option("--roster", o.roster, "Roster CSV");
    app.add_option("--wallets", o.wallets, "Wallet directory CSV");
    app.add_option("--prices", o.prices, "Daily price CSV");
    app.add_flag("--single-pass-clean", o.single_pass_clean, "Check deposit/withdrawal rules against all ponzi-kind transactions");

    auto* harvest_cmd = app.add_subcommand("harvest", "Build a roster from a profile corpus and tags");
    harvest_cmd->add_option("--corpus", o.corpus, "Profile corpus directory")->required();
    harvest_cmd->add_option("--tags", o.tags, "Tags CSV (address,label,verified)");
    harvest_cmd->add_option("--marker", o.marker, "Substring identifying member profile links")->capture_default_str();
    harvest_cmd->add_option("--tag-marker", o.tag_marker, "Substring a tag label must contain")->capture_default_str();
    harvest_cmd->add_option("--exclude", o.exclusions, "Tag label exclusion regex (repeatable, replaces defaults)")
        ->each([&](const std::string&) { o.exclusions_set = true; });
    harvest_cmd->add_flag("--verify-checksum", o.verify_checksum, "Reject addresses with a bad checksum");

    app.add_subcommand("ingest", "Type and clean transactions");

    auto* metrics_cmd = app.add_subcommand("metrics", "Daily metrics and the net worth ledger");
    metrics_cmd->add_option("--phases", o.phases_file, "Phases JSON fixing the ledger span");
    metrics_cmd->add_flag("--all-roster-gini", o.all_roster_gini, "Gini over every roster address");
    metrics_cmd->add_flag("--all-roster-cvr", o.all_roster_cvr, "CVR denominator is the whole roster");
    metrics_cmd->add_flag("--literal-scan", o.literal_scan, "Farthest-crossing cycle boundaries");

    auto* phases_cmd = app.add_subcommand("phases", "Lifecycle segmentation");
    phases_cmd->add_flag("--literal-scan", o.literal_scan, "Farthest-crossing cycle boundaries");

    auto* classify_cmd = app.add_subcommand("classify", "Likely scammers and victims");
    classify_cmd->add_option("--phases", o.phases_file, "Phases JSON fixing the hyperoperation");
    classify_cmd->add_option("--top-k", o.top_k, "Daily ranking depth")->capture_default_str();
    classify_cmd->add_flag("--full-months", o.full_months, "Ignore partial months at the phase edges");
    classify_cmd->add_flag("--all-roster-cvr", o.all_roster_cvr, "CVR denominator is the whole roster");
    classify_cmd->add_flag("--literal-scan", o.literal_scan, "Farthest-crossing cycle boundaries");

    auto* flows_cmd = app.add_subcommand("flows", "External service shares and the geo network");
    flows_cmd->add_flag("--value-weighted-shares", o.value_weighted_shares, "Weight shares by counterparty value");
    flows_cmd->add_flag("--include-self-loops", o.include_self_loops, "Keep intra-country edges in the DOT output");
    flows_cmd->add_option("--pair", o.pairs, "Country pair A:B for the asymmetry ratio (repeatable)");

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic scheme with ground truth");
    sim_cmd->add_option("--scenario", o.scenario, "Scenario JSON");
    sim_cmd->add_option("--seed", o.seed, "Override the scenario seed");

    auto* report_cmd = app.add_subcommand("report", "Markdown report from earlier outputs");
    report_cmd->add_option("--from", o.report_from, "Directory holding the artifacts (default: --out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        Files files;
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "harvest") files = cmd_harvest(o);
        else if (name == "ingest") files = cmd_ingest(o);
        else if (name == "metrics") files = cmd_metrics(o);
        else if (name == "phases") files = cmd_phases(o);
        else if (name == "classify") files = cmd_classify(o);
        else if (name == "flows") files = cmd_flows(o);
        else if (name == "simulate") files = cmd_simulate(o);
        else if (name == "report") files = cmd_report(o);
        pipeline::write_outputs(o.out, files);
        for (const auto& f : files) log(Level::info, "wrote " + f.first);
        return 0;
    } catch (const InputError& e) {
        return fail("input", e.what(), 2);
    } catch (const nlohmann::json::exception& e) {
        return fail("input", e.what(), 2);
    } catch (const InvariantError& e) {
        return fail("invariant", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
}
