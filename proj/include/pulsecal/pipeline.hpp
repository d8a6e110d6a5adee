// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "pulsecal/pulse.hpp"
#include "pulsecal/residual.hpp"
#include "pulsecal/sensitivity.hpp"

namespace pulsecal {

struct PipelineOptions {
    Nanos filter_ns = kRecommendedFilterNs;
    PerfConvention convention = PerfConvention::Outer;
    std::size_t warmup_exclude = kDefaultWarmupExclude;
    Nanos gap_threshold_ns = kDefaultGapThresholdNs;
};

struct PipelineResult {
    std::vector<AlignedTrial> aligned;
    std::vector<ResidualSeries> series;
    std::vector<TrialStats> stats;
    std::size_t pair_count = 0;
};

/// filter -> pair -> segment -> align -> residuals -> per-trial stats.
///
/// With one capture the trials are found by gap segmentation. With several captures
/// each one holds exactly one trial, in log order, and segmentation is skipped.
/// Throws AlignmentError when pairing fails or counts disagree.
PipelineResult run_pipeline(std::span<const EdgeCapture> captures, std::span<const TrialRecords> trials,
                            const PipelineOptions &options = {});

}  // namespace pulsecal
