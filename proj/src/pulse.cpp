// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/pulse.hpp"

#include <queue>
#include <tuple>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct Transition {
    Nanos time;
    Direction direction;
    bool recorded;  // false for the implied edge ahead of a same-direction duplicate
    std::size_t prev;
    std::size_t next;
    bool alive;
};

// A dwell is identified by its left transition; `right` detects stale heap entries.
struct Dwell {
    Nanos duration;
    Nanos start;
    std::size_t left;
    std::size_t right;

    bool operator>(const Dwell &o) const
    {
        return std::tie(duration, start, left) > std::tie(o.duration, o.start, o.left);
    }
};

}  // namespace

const char *to_string(ViolationKind kind) noexcept
{
    switch (kind) {
    case ViolationKind::ConsecutiveSameDirection:
        return "consecutive-same-direction";
    case ViolationKind::LeadingFall:
        return "leading-fall";
    case ViolationKind::TrailingRise:
        return "trailing-rise";
    }
    return "?";
}

const char *to_string(Status status) noexcept
{
    return status == Status::Pass ? "pass" : "fail";
}

EdgeCapture glitch_filter(const EdgeCapture &capture, Nanos threshold_ns)
{
    if (threshold_ns < 0) {
        throw ConfigError("glitch filter threshold must be >= 0");
    }
    if (threshold_ns == 0 || capture.events.size() < 2) {
        return capture;
    }

    std::vector<Transition> nodes;
    nodes.reserve(capture.events.size() + 8);
    Direction level = opposite(capture.events.front().direction);
    for (const auto &e : capture.events) {
        if (e.direction == level) {
            nodes.push_back({e.timestamp, opposite(e.direction), false, kNone, kNone, true});
        }
        nodes.push_back({e.timestamp, e.direction, true, kNone, kNone, true});
        level = e.direction;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].prev = i == 0 ? kNone : i - 1;
        nodes[i].next = i + 1 == nodes.size() ? kNone : i + 1;
    }

    std::priority_queue<Dwell, std::vector<Dwell>, std::greater<>> heap;
    auto push = [&](std::size_t left) {
        if (left == kNone || nodes[left].next == kNone) {
            return;
        }
        const auto right = nodes[left].next;
        heap.push({nodes[right].time - nodes[left].time, nodes[left].time, left, right});
    };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        push(i);
    }

    while (!heap.empty()) {
        const Dwell d = heap.top();
        if (d.duration >= threshold_ns) {
            break;
        }
        heap.pop();
        auto &l = nodes[d.left];
        if (!l.alive || l.next != d.right || !nodes[d.right].alive) {
            continue;
        }
        auto &r = nodes[d.right];
        const auto before = l.prev;
        const auto after = r.next;
        l.alive = false;
        r.alive = false;
        if (before != kNone) {
            nodes[before].next = after;
        }
        if (after != kNone) {
            nodes[after].prev = before;
        }
        if (before != kNone && after != kNone) {
            push(before);
        }
    }

    EdgeCapture out;
    out.sample_rate_hz = capture.sample_rate_hz;
    out.source_id = capture.source_id;
    for (const auto &n : nodes) {
        if (n.alive && n.recorded) {
            out.events.push_back({n.time, n.direction});
        }
    }
    out.alternating = is_alternating(out.events);
    return out;
}

PairingOutcome pair_edges(const EdgeCapture &capture, std::optional<std::size_t> expected_count)
{
    PairingOutcome outcome;
    outcome.expected_count = expected_count;
    bool is_open = false;
    Nanos open = 0;
    for (const auto &e : capture.events) {
        if (e.direction == Direction::Rising) {
            if (is_open) {
                outcome.violations.push_back({e.timestamp, ViolationKind::ConsecutiveSameDirection});
            }
            open = e.timestamp;
            is_open = true;
        } else if (is_open) {
            outcome.pairs.push_back({open, e.timestamp});
            is_open = false;
        } else {
            outcome.violations.push_back({e.timestamp, ViolationKind::LeadingFall});
        }
    }
    if (is_open) {
        outcome.violations.push_back({open, ViolationKind::TrailingRise});
    }
    const bool count_ok = !expected_count || *expected_count == outcome.pairs.size();
    outcome.status = outcome.violations.empty() && count_ok ? Status::Pass : Status::Fail;
    return outcome;
}

std::vector<std::vector<PulsePair>> segment_trials(std::span<const PulsePair> pairs, Nanos gap_threshold_ns)
{
    if (gap_threshold_ns <= 0) {
        throw ConfigError("segment gap threshold must be > 0");
    }
    std::vector<std::vector<PulsePair>> segments;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i == 0 || pairs[i].rise_ns - pairs[i - 1].fall_ns > gap_threshold_ns) {
            segments.emplace_back();
        }
        segments.back().push_back(pairs[i]);
    }
    return segments;
}

std::vector<AlignedTrial> align(std::span<const TrialRecords> trials,
                                std::span<const std::vector<PulsePair>> segments, std::size_t warmup_exclude)
{
    if (trials.size() != segments.size()) {
        throw AlignmentError(fmt::format("alignment FAIL: {} trials in the log but {} pulse segments in the capture",
                                         trials.size(), segments.size()));
    }
    std::vector<AlignedTrial> aligned;
    aligned.reserve(trials.size());
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto &records = trials[t].records;
        const auto &pulses = segments[t];
        if (records.size() != pulses.size()) {
            throw AlignmentError(fmt::format("alignment FAIL: trial '{}' has {} records but {} pulses",
                                             trials[t].trial_id, records.size(), pulses.size()));
        }
        AlignedTrial at;
        at.trial_id = trials[t].trial_id;
        at.items.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (i > 0 && records[i].index <= records[i - 1].index) {
                throw AlignmentError(
                    fmt::format("trial '{}': record indices not strictly increasing", trials[t].trial_id));
            }
            at.items.push_back({records[i], pulses[i]});
        }
        at.warmup_excluded = std::min(warmup_exclude, at.items.size());
        aligned.push_back(std::move(at));
    }
    return aligned;
}

}  // namespace pulsecal
