#pragma once

// Glue shared by the command-line tool and the Python bindings: dataset
// loading from files, phase detection in calendar terms and atomic output.

#include "ponzi/dataset.hpp"
#include "ponzi/phases.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ponzi::pipeline {

struct DatasetPaths {
    std::string transactions;
    std::string roster;
    std::string wallets;  // optional; empty means no wallet directory
    std::string prices;

    /// transactions.ndjson, roster.csv, wallets.csv (if present), prices.csv
    static DatasetPaths from_dir(const std::filesystem::path& dir);
};

struct LoadOptions {
    WindowSpec window = WindowSpec::automatic();
    txclass::CleanMode clean = txclass::CleanMode::fixpoint;
};

struct Loaded {
    SchemeDataset dataset;
    BuildReport report;
};

Loaded load(const DatasetPaths& paths, const LoadOptions& opts = {});

/// Parses "A..B", "all" or "auto".
WindowSpec parse_window(std::string_view text, double coverage = 0.98);

/// DTV for each window day.
std::vector<phases::Volume> volume_series(const SchemeDataset& ds);

struct PhaseResult {
    phases::Partition partition;
    Date origin;
    DayRange hyperoperation;  // calendar days
    std::string json;
};

PhaseResult detect_phases(const SchemeDataset& ds, phases::ScanMode scan = phases::ScanMode::nearest);

/// Hyperoperation range read from a phases JSON file; must lie inside the window.
DayRange hyper_range_from_file(const std::string& path, const SchemeDataset& ds);

/// Writes every file into a staging directory inside `out_dir` and renames
/// them into place only after all writes succeeded.
void write_outputs(const std::filesystem::path& out_dir, const std::vector<std::pair<std::string, std::string>>& files);

/// Markdown summary of whichever known artifacts exist in `dir`.
std::string render_report(const std::filesystem::path& dir, std::size_t max_rows = 20);

}  // namespace ponzi::pipeline
