// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/pipeline.hpp"

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

PairingOutcome filtered_pairs(const EdgeCapture &capture, Nanos filter_ns, std::size_t expected,
                              const std::string &what)
{
    auto outcome = pair_edges(glitch_filter(capture, filter_ns), expected);
    if (!outcome.passed()) {
        std::string detail = fmt::format("{} pairs, expected {}", outcome.pair_count(), expected);
        if (!outcome.violations.empty()) {
            const auto &v = outcome.violations.front();
            detail += fmt::format("; {} strict-ordering violations, first {} at {} ns", outcome.violations.size(),
                                  to_string(v.kind), v.timestamp);
        }
        throw AlignmentError(fmt::format("alignment FAIL in {} at filter {} ns: {}", what, filter_ns, detail));
    }
    return outcome;
}

}  // namespace

PipelineResult run_pipeline(std::span<const EdgeCapture> captures, std::span<const TrialRecords> trials,
                            const PipelineOptions &options)
{
    if (captures.empty()) {
        throw ConfigError("no edge capture supplied");
    }
    if (trials.empty()) {
        throw ConfigError("orchestrator log holds no records");
    }
    PipelineResult result;
    std::vector<std::vector<PulsePair>> segments;
    if (captures.size() == 1) {
        std::size_t expected = 0;
        for (const auto &t : trials) {
            expected += t.records.size();
        }
        const auto outcome = filtered_pairs(captures.front(), options.filter_ns, expected,
                                            captures.front().source_id.empty() ? "capture" : captures.front().source_id);
        result.pair_count = outcome.pair_count();
        segments = segment_trials(outcome.pairs, options.gap_threshold_ns);
    } else {
        if (captures.size() != trials.size()) {
            throw AlignmentError(fmt::format("alignment FAIL: {} per-trial captures for {} trials", captures.size(),
                                             trials.size()));
        }
        for (std::size_t i = 0; i < captures.size(); ++i) {
            auto outcome = filtered_pairs(captures[i], options.filter_ns, trials[i].records.size(),
                                          fmt::format("trial '{}'", trials[i].trial_id));
            result.pair_count += outcome.pair_count();
            segments.push_back(std::move(outcome.pairs));
        }
    }
    result.aligned = align(trials, segments, options.warmup_exclude);
    for (const auto &t : result.aligned) {
        result.series.push_back(compute_deltas(t, options.convention));
        result.stats.push_back(trial_stats(result.series.back()));
    }
    return result;
}

}  // namespace pulsecal
