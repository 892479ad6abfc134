#include "ponzi/classify.hpp"
#include "ponzi/errors.hpp"
#include "ponzi/flows.hpp"
#include "ponzi/harvest.hpp"
#include "ponzi/metrics.hpp"
#include "ponzi/phases.hpp"
#include "ponzi/pipeline.hpp"
#include "ponzi/simgen.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <numeric>

namespace py = pybind11;
using namespace ponzi;

namespace {

phases::Options scan_options(const std::string& scan) {
    if (scan == "nearest") return {phases::ScanMode::nearest};
    if (scan == "literal") return {phases::ScanMode::literal};
    throw InputError("scan must be 'nearest' or 'literal', got '" + scan + "'");
}

py::dict cycle_dict(const phases::Cycle& c) {
    py::dict d;
    d["starts"] = c.starts;
    d["ends"] = c.ends;
    d["peak_day"] = c.peak_day;
    d["peak_vol"] = c.peak_vol;
    d["duration"] = c.duration;
    d["factor"] = py::make_tuple(static_cast<std::int64_t>(c.factor.num), static_cast<std::int64_t>(c.factor.den));
    return d;
}

py::dict phase_dict(const phases::Phase& p) {
    py::dict d;
    d["starts"] = p.starts;
    d["ends"] = p.ends;
    py::list cycles;
    for (const auto& c : p.cycles) cycles.append(cycle_dict(c));
    d["cycles"] = cycles;
    return d;
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

/// A loaded dataset with the hyperoperation span already detected.
class Dataset {
public:
    Dataset(const std::string& dir, const std::string& window, bool single_pass)
        : loaded_(std::make_shared<pipeline::Loaded>(pipeline::load(
              pipeline::DatasetPaths::from_dir(dir),
              {pipeline::parse_window(window),
               single_pass ? txclass::CleanMode::single_pass : txclass::CleanMode::fixpoint}))),
          phases_(pipeline::detect_phases(loaded_->dataset)) {}

    const SchemeDataset& ds() const { return loaded_->dataset; }

    std::pair<std::string, std::string> window() const { return {ds().window().first.str(), ds().window().last.str()}; }
    std::pair<std::string, std::string> hyperoperation() const {
        return {phases_.hyperoperation.first.str(), phases_.hyperoperation.last.str()};
    }
    std::string cleaning_report() const { return loaded_->report.cleaning.to_json(); }
    std::vector<phases::Volume> volumes() const { return pipeline::volume_series(ds()); }
    std::string phases_json() const { return phases_.json; }

    std::string daily(const std::string& format, bool all_roster) const {
        metrics::DailyOptions o;
        if (all_roster) o.gini_population = metrics::GiniPopulation::all_roster;
        const auto rows = metrics::daily_metrics(ds(), o);
        if (format == "csv") return metrics::daily_csv(rows);
        if (format == "json") return metrics::daily_json(rows);
        throw InputError("format must be 'csv' or 'json'");
    }
    double total_dnd() const { return metrics::total_dnd(ds(), ds().window()).dollars(); }
    double total_abs_dnd() const { return metrics::total_abs_dnd(ds(), ds().window()).dollars(); }
    py::object dgi(const std::string& day, bool all_roster) const {
        return opt(metrics::dgi(ds(), Date::parse(day),
                                all_roster ? metrics::GiniPopulation::all_roster : metrics::GiniPopulation::active));
    }
    py::object cvr(const std::string& day) const { return opt(ledger().cvr(Date::parse(day))); }

    std::vector<std::string> likely_scammers(std::size_t k, bool full_months) const {
        classify::ScammerOptions o;
        o.top_k = k;
        o.full_months_only = full_months;
        const auto found = classify::likely_scammers(ledger(), o).scammers;
        return {found.begin(), found.end()};
    }
    std::string scammer_report() const {
        const auto l = ledger();
        return classify::scammers_json(classify::scammer_report(ds(), l, classify::likely_scammers(l).scammers));
    }

    std::string shares(bool value_weighted) const {
        return flows::shares_json(
            flows::external_shares(ds(), value_weighted ? flows::ShareMode::value_weighted : flows::ShareMode::incidence));
    }
    std::string geo_json() const { return flows::geo_json(flows::build_geo_network(ds())); }
    std::string geo_dot(bool self_loops) const { return flows::geo_dot(flows::build_geo_network(ds()), {self_loops}); }
    py::dict asymmetry(const std::string& a, const std::string& b) const {
        const auto r = flows::asymmetry(flows::build_geo_network(ds()), a, b);
        py::dict d;
        d["ratio"] = opt(r.ratio);
        d["forward_usd"] = r.forward.dollars();
        d["backward_usd"] = r.backward.dollars();
        return d;
    }

private:
    metrics::NetWorthLedger ledger() const { return metrics::NetWorthLedger(ds(), phases_.hyperoperation); }

    std::shared_ptr<pipeline::Loaded> loaded_;
    pipeline::PhaseResult phases_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ponzi scheme transaction analysis";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    m.def(
        "gini",
        [](const std::vector<Satoshi>& values) -> py::object {
            const auto g = metrics::gini(values);
            if (!g) return py::none();
            auto num = static_cast<std::int64_t>(g->num), den = static_cast<std::int64_t>(g->den);
            const auto k = std::gcd(num, den);
            return py::make_tuple(num / k, den / k);
        },
        py::arg("values"), "Exact Gini coefficient as a reduced (num, den); None for an empty population.");

    m.def(
        "get_phase",
        [](const std::vector<phases::Volume>& vols, const std::string& scan) {
            return phase_dict(phases::get_phase(vols, scan_options(scan)));
        },
        py::arg("volumes"), py::arg("scan") = "nearest");

    m.def(
        "partition",
        [](const std::vector<phases::Volume>& vols, const std::string& scan) {
            const auto p = phases::partition(vols, scan_options(scan));
            py::dict d;
            d["bootstrap"] = py::make_tuple(p.bootstrap.begin, p.bootstrap.end);
            d["hyperoperation"] = phase_dict(p.hyperoperation);
            d["collapse"] = py::make_tuple(p.collapse.begin, p.collapse.end);
            return d;
        },
        py::arg("volumes"), py::arg("scan") = "nearest");

    m.def(
        "extract_addresses",
        [](const std::string& text, bool verify) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& e : harvest::extract_addresses(text, verify))
                out.emplace_back(e.address, std::string(to_string(e.kind)));
            return out;
        },
        py::arg("text"), py::arg("verify_checksum") = false);

    m.def(
        "simulate",
        [](const std::string& config_json) {
            const auto cfg = simgen::SimConfig::from_json(config_json.empty() ? "{}" : config_json, "config");
            cfg.validate();
            std::map<std::string, std::string> files;
            for (auto& [name, body] : simgen::dataset_files(simgen::generate(cfg), cfg)) files[name] = std::move(body);
            return files;
        },
        py::arg("config_json") = "", "Simulated dataset files keyed by file name.");

    m.def(
        "write_outputs",
        [](const std::string& dir, const std::map<std::string, std::string>& files) {
            pipeline::write_outputs(dir, {files.begin(), files.end()});
        },
        py::arg("out_dir"), py::arg("files"));

    m.def(
        "render_report", [](const std::string& dir, std::size_t rows) { return pipeline::render_report(dir, rows); },
        py::arg("dir"), py::arg("max_rows") = 20);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<const std::string&, const std::string&, bool>(), py::arg("dir"), py::arg("window") = "auto",
             py::arg("single_pass") = false)
        .def_property_readonly("window", &Dataset::window)
        .def_property_readonly("hyperoperation", &Dataset::hyperoperation)
        .def("cleaning_report", &Dataset::cleaning_report)
        .def("volumes", &Dataset::volumes)
        .def("phases_json", &Dataset::phases_json)
        .def("daily", &Dataset::daily, py::arg("format") = "csv", py::arg("all_roster") = false)
        .def("total_dnd", &Dataset::total_dnd)
        .def("total_abs_dnd", &Dataset::total_abs_dnd)
        .def("dgi", &Dataset::dgi, py::arg("day"), py::arg("all_roster") = false)
        .def("cvr", &Dataset::cvr, py::arg("day"))
        .def("likely_scammers", &Dataset::likely_scammers, py::arg("k") = 10, py::arg("full_months") = false)
        .def("scammer_report", &Dataset::scammer_report)
        .def("shares", &Dataset::shares, py::arg("value_weighted") = false)
        .def("geo_json", &Dataset::geo_json)
        .def("geo_dot", &Dataset::geo_dot, py::arg("self_loops") = false)
        .def("asymmetry", &Dataset::asymmetry, py::arg("a"), py::arg("b"));
}
