// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/sensitivity.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

std::vector<SweepRow> filter_sweep(const EdgeCapture &capture, std::span<const TrialRecords> trials,
                                   std::span<const Nanos> thresholds, std::size_t expected_count,
                                   const SweepOptions &options)
{
    if (thresholds.empty()) {
        throw ConfigError("sweep needs at least one threshold");
    }
    std::vector<SweepRow> rows;
    rows.reserve(thresholds.size());
    for (const auto threshold : thresholds) {
        if (threshold < 0) {
            throw ConfigError(fmt::format("sweep threshold {} ns is negative", threshold));
        }
        SweepRow row;
        row.threshold_ns = threshold;
        const auto filtered = glitch_filter(capture, threshold);
        row.edges_retained = filtered.events.size();
        const auto outcome = pair_edges(filtered, expected_count);
        row.pair_count = outcome.pair_count();
        row.violations = outcome.violations.size();
        row.status = outcome.status;
        if (!outcome.passed()) {
            row.note = outcome.violations.empty()
                           ? fmt::format("pair count {} != expected {}", row.pair_count, expected_count)
                           : fmt::format("{} strict-ordering violations, first {} at {} ns", row.violations,
                                         to_string(outcome.violations.front().kind),
                                         outcome.violations.front().timestamp);
            rows.push_back(std::move(row));
            continue;
        }
        try {
            const auto segments = segment_trials(outcome.pairs, options.gap_threshold_ns);
            const auto aligned = align(trials, segments, options.warmup_exclude);
            std::vector<Nanos> pooled;
            std::vector<TrialStats> stats;
            for (const auto &t : aligned) {
                auto series = compute_deltas(t, options.convention);
                pooled.insert(pooled.end(), series.deltas_ns.begin(), series.deltas_ns.end());
                stats.push_back(trial_stats(series));
            }
            row.median_delta_ns = median_ns(std::move(pooled));
            long double sum = 0.0L;
            for (const auto &s : stats) {
                sum += s.median_ns;
            }
            row.c_p_ns = static_cast<double>(sum / static_cast<long double>(stats.size()));
        } catch (const AlignmentError &e) {
            row.status = Status::Fail;
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ProfileSummary profile_summary(std::span<const ProfileSample> samples, std::size_t warmup_exclude)
{
    // a single surviving sample is no distribution to summarize
    if (samples.size() < warmup_exclude + 2) {
        throw ConfigError(fmt::format("profile has {} samples, need at least 2 beyond the {} warm-up iterations",
                                      samples.size(), warmup_exclude));
    }
    const auto used = samples.subspan(warmup_exclude);
    std::vector<Nanos> high, low, sum;
    high.reserve(used.size());
    low.reserve(used.size());
    sum.reserve(used.size());
    for (const auto &s : used) {
        high.push_back(s.high_ns);
        low.push_back(s.low_ns);
        sum.push_back(s.high_ns + s.low_ns);
    }
    ProfileSummary summary;
    summary.n = used.size();
    summary.med_high_ns = median_ns(std::move(high));
    summary.med_low_ns = median_ns(std::move(low));
    summary.med_sum_ns = median_ns(std::move(sum));
    return summary;
}

ProfileComparison profile_compare(const ProfileSummary &summary, double c_p_ns)
{
    if (c_p_ns == 0.0 || !std::isfinite(c_p_ns)) {
        throw ConfigError("profile comparison needs a nonzero platform constant");
    }
    ProfileComparison cmp;
    cmp.med_high_ns = summary.med_high_ns;
    cmp.med_low_ns = summary.med_low_ns;
    cmp.med_sum_ns = summary.med_sum_ns;
    cmp.c_p_abs_ns = std::abs(c_p_ns);
    cmp.coverage_ratio = cmp.med_sum_ns / cmp.c_p_abs_ns;
    cmp.residual_ns = cmp.med_sum_ns - cmp.c_p_abs_ns;
    cmp.over_prediction_fraction = cmp.residual_ns / cmp.c_p_abs_ns;
    return cmp;
}

ProfileComparison profile_compare(const ProfileSummary &summary, const PlatformCalibration &calibration)
{
    return profile_compare(summary, calibration.c_p_ns);
}

}  // namespace pulsecal
