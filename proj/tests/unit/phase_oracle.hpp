#pragma once

#include "ponzi/phases.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

// Reference transcription of the segmentation listings, kept structurally
// apart from the library: its own fraction type, a list with insert-at-front,
// and explicit index loops.
namespace oracle {

using ponzi::phases::Volume;

struct Frac {
    __int128 n, d;
};

inline Frac norm(__int128 n, __int128 d) {
    __int128 a = n, b = d;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return {n / a, d / a};
}

struct Cyc {
    long starts, ends, peak_day, duration;
    long peak_vol;
    Frac factor;
};

inline std::pair<long, long> get_peak(const std::vector<Volume>& vols, long start_day, long end_day) {
    long peak_vol = 0, peak_day = start_day;
    for (long day = start_day; day < end_day; day++)
        if (vols[day] > peak_vol) peak_vol = vols[day], peak_day = day;
    return {peak_vol, peak_day};
}

inline Frac get_factor(const std::vector<Cyc>& cycles, long ref_index, long peak_vol) {
    if (cycles.empty()) return {10, 1};
    const Cyc& last = cycles[static_cast<std::size_t>(ref_index)];
    if (last.peak_vol == 0) throw std::runtime_error("zero peak");
    Frac f = norm(last.factor.n * peak_vol, last.factor.d * last.peak_vol);
    if (f.n < f.d) f = {1, 1};
    return f;
}

inline bool at_most(long v, long peak, Frac f) { return static_cast<__int128>(v) * f.n <= static_cast<__int128>(peak) * f.d; }

inline Cyc get_cycle(const std::vector<Volume>& vols, const std::vector<Cyc>& cycles, long ref_index, long start_day, long end_day,
              bool before) {
    auto [peak_vol, peak_day] = get_peak(vols, start_day, end_day);
    Cyc c{};
    c.peak_vol = peak_vol;
    c.peak_day = peak_day;
    c.factor = get_factor(cycles, ref_index, peak_vol);
    c.starts = start_day;
    for (long day = peak_day - 1; day >= start_day; day--)
        if (at_most(vols[day], peak_vol, c.factor)) {
            c.starts = day;
            break;
        }
    c.ends = end_day;
    for (long day = peak_day + 1; day <= end_day; day++)
        if (at_most(vols[day], peak_vol, c.factor)) {
            c.ends = day;
            break;
        }
    if (!cycles.empty()) {
        const Cyc& ref = cycles[static_cast<std::size_t>(ref_index)];
        if (before)
            c.ends = std::min(c.ends, ref.starts);
        else
            c.starts = std::max(c.starts, ref.ends);
    }
    c.duration = c.ends - c.starts;
    return c;
}

inline bool valid_cycle(const Cyc& c, const Cyc& ref) {
    if (c.peak_vol == 0) return false;
    const bool low = static_cast<__int128>(c.duration) * c.factor.n >= static_cast<__int128>(ref.duration) * c.factor.d;
    const bool high = c.duration < ref.duration;
    return low && high;
}

inline std::vector<Cyc> get_phase(const std::vector<Volume>& vols) {
    const long last = static_cast<long>(vols.size()) - 1;
    std::vector<Cyc> cycles;
    cycles.push_back(get_cycle(vols, cycles, 0, 0, last, false));
    if (cycles[0].peak_vol == 0) throw std::runtime_error("no peak");
    for (;;) {
        Cyc c = get_cycle(vols, cycles, 0, 0, cycles[0].starts, true);
        if (!valid_cycle(c, cycles[0])) break;
        cycles.insert(cycles.begin(), c);
    }
    for (;;) {
        const long r = static_cast<long>(cycles.size()) - 1;
        Cyc c = get_cycle(vols, cycles, r, cycles.back().ends, last, false);
        if (!valid_cycle(c, cycles.back())) break;
        cycles.push_back(c);
    }
    return cycles;
}

/// Mixture of noise, random walks and triangular bumps, length 1..400.
inline std::vector<Volume> random_series(std::mt19937_64& rng) {
    const std::size_t n = 1 + rng() % 400;
    std::vector<Volume> v(n, 0);
    switch (rng() % 3) {
    case 0:  // noise
        for (auto& x : v) x = static_cast<Volume>(rng() % 50);
        break;
    case 1: {  // random walk
        Volume cur = static_cast<Volume>(rng() % 20);
        for (auto& x : v) {
            cur = std::max<Volume>(0, cur + static_cast<Volume>(rng() % 21) - 10);
            x = cur;
        }
        break;
    }
    default: {  // a few triangular bumps on a low base
        for (auto& x : v) x = static_cast<Volume>(rng() % 4);
        const int bumps = 1 + static_cast<int>(rng() % 4);
        for (int b = 0; b < bumps; ++b) {
            const long centre = static_cast<long>(rng() % n);
            const long width = 1 + static_cast<long>(rng() % 30);
            const Volume height = 10 + static_cast<Volume>(rng() % 5000);
            for (long d = centre - width; d <= centre + width; ++d) {
                if (d < 0 || d >= static_cast<long>(n)) continue;
                v[static_cast<std::size_t>(d)] += height * (width - std::labs(d - centre)) / width;
            }
        }
    }
    }
    if (std::all_of(v.begin(), v.end(), [](Volume x) { return x == 0; })) v[rng() % n] = 1;
    return v;
}

/// Same cycles, bounds and exact factors.
inline bool same_phase(const ponzi::phases::Phase& got, const std::vector<Cyc>& want) {
    if (got.cycles.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i) {
        const auto& g = got.cycles[i];
        const auto& w = want[i];
        if (g.starts != w.starts || g.ends != w.ends || g.peak_day != w.peak_day || g.peak_vol != w.peak_vol ||
            g.duration != w.duration || g.factor.num != w.factor.n || g.factor.den != w.factor.d)
            return false;
    }
    return got.starts == want.front().starts && got.ends == want.back().ends;
}

}  // namespace oracle
