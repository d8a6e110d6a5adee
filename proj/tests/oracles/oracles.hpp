// SPDX-License-Identifier: Apache-2.0
// Slow, obviously-correct reference implementations. Kept apart from the library on
// purpose: none of this code calls into pulsecal beyond the plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "pulsecal/types.hpp"

namespace oracle {

using pulsecal::Direction;
using pulsecal::EdgeEvent;
using pulsecal::Nanos;

// Level timeline: the line's level as a list of segments. A boundary between two
// segments is a transition; `real` is false for the opposite transition implied by
// two same-direction edges in a row.
struct Boundary {
    Nanos time;
    bool real;
};

struct Timeline {
    std::vector<bool> high;            // level of segment i
    std::vector<Boundary> boundaries;  // boundary i sits between segment i and i+1
};

inline Timeline build_timeline(const std::vector<EdgeEvent> &events)
{
    Timeline tl;
    if (events.empty()) {
        return tl;
    }
    bool level = events.front().direction != Direction::Rising;
    tl.high.push_back(level);
    for (const auto &e : events) {
        const bool target = e.direction == Direction::Rising;
        if (target == level) {
            level = !level;
            tl.high.push_back(level);
            tl.boundaries.push_back({e.timestamp, false});
        }
        level = target;
        tl.high.push_back(level);
        tl.boundaries.push_back({e.timestamp, true});
    }
    return tl;
}

// Repeatedly delete the shortest bounded segment below the threshold (earliest on
// ties) by merging it into its neighbours.
inline std::vector<EdgeEvent> glitch_filter(const std::vector<EdgeEvent> &events, Nanos threshold)
{
    if (threshold <= 0) {
        return events;
    }
    Timeline tl = build_timeline(events);
    for (;;) {
        std::optional<std::size_t> pick;
        Nanos best = std::numeric_limits<Nanos>::max();
        // segment s (1..size-2) is bounded by boundaries s-1 and s
        for (std::size_t s = 1; s + 1 < tl.high.size(); ++s) {
            const Nanos dur = tl.boundaries[s].time - tl.boundaries[s - 1].time;
            if (dur < threshold && dur < best) {
                best = dur;
                pick = s;
            }
        }
        if (!pick) {
            break;
        }
        const auto s = *pick;
        tl.high.erase(tl.high.begin() + static_cast<long>(s), tl.high.begin() + static_cast<long>(s) + 2);
        tl.boundaries.erase(tl.boundaries.begin() + static_cast<long>(s) - 1,
                            tl.boundaries.begin() + static_cast<long>(s) + 1);
    }
    std::vector<EdgeEvent> out;
    for (std::size_t b = 0; b < tl.boundaries.size(); ++b) {
        if (tl.boundaries[b].real) {
            const bool rising = tl.high[b + 1];
            out.push_back({tl.boundaries[b].time, rising ? Direction::Rising : Direction::Falling});
        }
    }
    return out;
}

enum class Violation { Consecutive, LeadingFall, TrailingRise };

struct Pairing {
    std::vector<std::pair<Nanos, Nanos>> pairs;
    std::vector<std::pair<Nanos, Violation>> violations;
};

// Pairs are exactly the adjacent (R, F) positions of the sequence.
inline Pairing pair_edges(const std::vector<EdgeEvent> &ev)
{
    Pairing p;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const bool rise = ev[i].direction == Direction::Rising;
        const bool prev_rise = i > 0 && ev[i - 1].direction == Direction::Rising;
        if (rise) {
            if (prev_rise) {
                p.violations.push_back({ev[i].timestamp, Violation::Consecutive});
            }
            if (i + 1 == ev.size()) {
                p.violations.push_back({ev[i].timestamp, Violation::TrailingRise});
            }
        } else if (prev_rise) {
            p.pairs.push_back({ev[i - 1].timestamp, ev[i].timestamp});
        } else {
            p.violations.push_back({ev[i].timestamp, Violation::LeadingFall});
        }
    }
    return p;
}

inline double median(std::vector<Nanos> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    if (n % 2 == 1) {
        return static_cast<double>(v[n / 2]);
    }
    // both halves are integers, so the sum is exact in long double
    return static_cast<double>((static_cast<long double>(v[n / 2 - 1]) + v[n / 2]) / 2.0L);
}

inline double sample_std(const std::vector<Nanos> &v)
{
    long double mean = 0;
    for (auto x : v) {
        mean += x;
    }
    mean /= static_cast<long double>(v.size());
    long double ss = 0;
    for (auto x : v) {
        ss += (x - mean) * (x - mean);
    }
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

inline double mean(const std::vector<double> &v)
{
    long double s = 0;
    for (auto x : v) {
        s += x;
    }
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

}  // namespace oracle
