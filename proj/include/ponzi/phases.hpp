#pragma once

// Lifecycle segmentation of a daily volume series into bootstrap,
// hyperoperation (a chain of growth/decay cycles) and collapse.

#include "ponzi/date.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ponzi::phases {

using Day = std::int64_t;     // offset into the series
using Volume = std::int64_t;  // non-negative daily count

/// Exact positive rational, always reduced with den > 0.
struct Factor {
    std::int64_t num = 10;
    std::int64_t den = 1;

    static Factor make(__int128 num, __int128 den);
    friend bool operator==(Factor, Factor) = default;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    /// Decimal rendering, at most 6 fractional digits, trailing zeros trimmed.
    std::string decimal() const;
    /// "num/den", or "num" when den == 1.
    std::string exact() const;
};

struct Cycle {
    Day starts = 0;
    Day ends = 0;
    Day peak_day = 0;
    Day duration = 0;
    Volume peak_vol = 0;
    Factor factor;

    friend bool operator==(const Cycle&, const Cycle&) = default;
};

struct Phase {
    Day starts = 0;
    Day ends = 0;
    std::vector<Cycle> cycles;  // chronological

    friend bool operator==(const Phase&, const Phase&) = default;
};

enum class ScanMode {
    /// Boundary = first qualifying day walking outward from the peak.
    nearest,
    /// Loops run to the range boundary without stopping, so the farthest
    /// qualifying day wins.
    literal,
};

enum class Direction { before, after };

/// Largest volume over the half-open range [start_day, end_day), earliest day
/// on ties. Empty range or all zeros -> (0, start_day).
std::pair<Volume, Day> get_peak(std::span<const Volume> vols, Day start_day, Day end_day);

/// 10 without a reference cycle; otherwise max(1, ref.factor * peak_vol / ref.peak_vol).
/// Throws InputError when the reference peak is zero.
Factor get_factor(const Cycle* reference, Volume peak_vol);

/// Finds the peak in [start_day, end_day) and the nearest days around it whose
/// volume is at most peak/factor (falling back to the range bounds). The cycle
/// is clamped so it does not overlap `reference` on the side it was searched from.
Cycle get_cycle(std::span<const Volume> vols, const Cycle* reference, Day start_day, Day end_day,
                Direction direction = Direction::after, ScanMode scan = ScanMode::nearest);

/// reference.duration / cycle.factor <= cycle.duration < reference.duration,
/// and the candidate must have a non-zero peak.
bool valid_cycle(const Cycle& cycle, const Cycle& reference);

struct Options {
    ScanMode scan = ScanMode::nearest;
};

/// Hyperoperation phase of the series. Throws InputError for an empty or
/// peakless series.
Phase get_phase(std::span<const Volume> vols, Options opts = {});

/// Half-open day range [begin, end).
struct Span {
    Day begin = 0;
    Day end = 0;
    bool empty() const { return begin >= end; }
    friend bool operator==(Span, Span) = default;
};

struct Partition {
    Span bootstrap;       // [0, phase.starts)
    Phase hyperoperation; // [phase.starts, phase.ends]
    Span collapse;        // (phase.ends, n]
};

Partition partition(std::span<const Volume> vols, Options opts = {});

/// Phases JSON with calendar dates computed from the series origin.
std::string to_json(const Partition& p, Date origin);
/// Reads a phases JSON document back (dates only; cycles with their factors).
struct PhaseDates {
    Date bootstrap_start, bootstrap_end;
    Date hyper_start, hyper_end;
    Date collapse_start, collapse_end;
    bool has_bootstrap = false, has_collapse = false;
    std::vector<Date> peak_days;
};
PhaseDates parse_phase_dates(std::string_view json_text);

}  // namespace ponzi::phases
