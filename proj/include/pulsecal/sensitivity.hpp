// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsecal/pulse.hpp"
#include "pulsecal/residual.hpp"

namespace pulsecal {

inline constexpr std::array<Nanos, 13> kDefaultSweepThresholdsNs = {0,   25,  50,  75,  100,  125, 150,
                                                                    175, 200, 250, 500, 1000, 2000};
inline constexpr Nanos kRecommendedFilterNs = 100;
inline constexpr std::size_t kDefaultProfileWarmup = 20;

struct SweepOptions {
    Nanos gap_threshold_ns = kDefaultGapThresholdNs;
    std::size_t warmup_exclude = kDefaultWarmupExclude;
    PerfConvention convention = PerfConvention::Outer;
};

struct SweepRow {
    Nanos threshold_ns = 0;
    std::size_t edges_retained = 0;
    std::size_t pair_count = 0;
    Status status = Status::Fail;
    std::size_t violations = 0;
    std::optional<double> median_delta_ns;  // pooled median of effective residuals, only on pass
    std::optional<double> c_p_ns;           // mean of trial medians, only on pass
    std::string note;                       // why a row failed
};

/// glitch_filter, pair_edges and, when pairing passes, segment + align + residuals per
/// threshold. Rows come back in the order of `thresholds`.
std::vector<SweepRow> filter_sweep(const EdgeCapture &capture, std::span<const TrialRecords> trials,
                                   std::span<const Nanos> thresholds, std::size_t expected_count,
                                   const SweepOptions &options = {});

struct ProfileSummary {
    double med_high_ns = 0.0;
    double med_low_ns = 0.0;
    double med_sum_ns = 0.0;  // median of per-iteration high + low
    std::size_t n = 0;        // samples after warm-up
};

ProfileSummary profile_summary(std::span<const ProfileSample> samples,
                               std::size_t warmup_exclude = kDefaultProfileWarmup);

struct ProfileComparison {
    double med_high_ns = 0.0;
    double med_low_ns = 0.0;
    double med_sum_ns = 0.0;
    double c_p_abs_ns = 0.0;
    double coverage_ratio = 0.0;            // med_sum / |C_p|
    double residual_ns = 0.0;               // med_sum - |C_p|
    double over_prediction_fraction = 0.0;  // residual / |C_p|
};

ProfileComparison profile_compare(const ProfileSummary &summary, double c_p_ns);
ProfileComparison profile_compare(const ProfileSummary &summary, const PlatformCalibration &calibration);

}  // namespace pulsecal
