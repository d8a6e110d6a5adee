// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsecal/types.hpp"

namespace pulsecal {

/// Removes spurious edges: repeatedly deletes the two edges bounding the shortest
/// interior dwell that is strictly shorter than threshold_ns (ties go to the earlier
/// dwell) until none is left. The unbounded levels before the first edge and after
/// the last edge are never dwells.
///
/// Two consecutive same-direction edges imply a missed opposite transition at the
/// later edge's timestamp, i.e. a zero-length dwell, so any positive threshold drops
/// the later duplicate. Threshold 0 returns the capture unchanged.
EdgeCapture glitch_filter(const EdgeCapture &capture, Nanos threshold_ns);

struct PulsePair {
    Nanos rise_ns = 0;
    Nanos fall_ns = 0;

    Nanos width_ns() const noexcept { return fall_ns - rise_ns; }

    friend bool operator==(const PulsePair &, const PulsePair &) = default;
};

enum class ViolationKind { ConsecutiveSameDirection, LeadingFall, TrailingRise };

const char *to_string(ViolationKind kind) noexcept;

struct PairingViolation {
    Nanos timestamp = 0;
    ViolationKind kind = ViolationKind::LeadingFall;

    friend bool operator==(const PairingViolation &, const PairingViolation &) = default;
};

enum class Status { Pass, Fail };

const char *to_string(Status status) noexcept;

struct PairingOutcome {
    std::vector<PulsePair> pairs;
    std::vector<PairingViolation> violations;
    std::optional<std::size_t> expected_count;
    Status status = Status::Pass;

    std::size_t pair_count() const noexcept { return pairs.size(); }
    bool passed() const noexcept { return status == Status::Pass; }
};

/// Strict-order pairing with greedy recovery. A rising edge opens a pulse and the
/// next falling edge closes it. A fall with nothing open is a leading-fall and is
/// skipped; a rise while a pulse is open is a consecutive-same-direction violation and
/// restarts the open pulse at the new edge; an unclosed pulse at the end is a
/// trailing-rise. Fails on any violation or on a count mismatch.
PairingOutcome pair_edges(const EdgeCapture &capture, std::optional<std::size_t> expected_count = std::nullopt);

inline constexpr Nanos kDefaultGapThresholdNs = 1'000'000'000;

/// Starts a new segment whenever rise(i+1) - fall(i) exceeds gap_threshold_ns.
std::vector<std::vector<PulsePair>> segment_trials(std::span<const PulsePair> pairs,
                                                   Nanos gap_threshold_ns = kDefaultGapThresholdNs);

struct AlignedItem {
    InferenceRecord record;
    PulsePair pulse;
};

struct AlignedTrial {
    std::string trial_id;
    std::vector<AlignedItem> items;  // full 1:1 alignment, warm-up included
    std::size_t warmup_excluded = 0;

    /// Items that feed statistics.
    std::span<const AlignedItem> effective() const noexcept
    {
        return std::span<const AlignedItem>(items).subspan(warmup_excluded);
    }
};

inline constexpr std::size_t kDefaultWarmupExclude = 1;

/// Pairs record i with pulse i per trial. Throws AlignmentError naming the trial on
/// any count mismatch, including a segment count different from the trial count.
std::vector<AlignedTrial> align(std::span<const TrialRecords> trials,
                                std::span<const std::vector<PulsePair>> segments,
                                std::size_t warmup_exclude = kDefaultWarmupExclude);

}  // namespace pulsecal
