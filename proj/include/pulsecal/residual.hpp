// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pulsecal/pulse.hpp"
#include "pulsecal/types.hpp"

namespace pulsecal {

/// Which software interval the wire width is compared against.
enum class PerfConvention {
    Outer,  // t3 - t0, contains the wire interval
    Inner,  // t2 - t1
};

PerfConvention parse_perf_convention(std::string_view text);
const char *to_string(PerfConvention c) noexcept;

struct ResidualSeries {
    std::string trial_id;
    std::vector<Nanos> deltas_ns;  // wire width minus software interval, signed
    PerfConvention convention = PerfConvention::Outer;
};

ResidualSeries compute_deltas(const AlignedTrial &trial, PerfConvention convention = PerfConvention::Outer);

/// Exact median: an integer or a half-integer for even counts. Throws ConfigError when empty.
double median_ns(std::vector<Nanos> values);

struct TrialStats {
    std::string trial_id;
    double median_ns = 0.0;
    std::optional<double> sample_std_ns;  // n - 1 denominator, absent for n < 2
    Nanos min_ns = 0;
    Nanos max_ns = 0;
    std::size_t n = 0;
};

TrialStats trial_stats(const ResidualSeries &series);

inline constexpr double kDefaultToleranceK = 2.5;

struct PlatformCalibration {
    OperatingStateTag tag;
    double c_p_ns = 0.0;  // mean of trial medians
    std::vector<double> trial_medians_ns;
    std::pair<double, double> median_range_ns{0.0, 0.0};
    std::pair<double, double> std_range_ns{0.0, 0.0};
    std::size_t n_trials = 0;
    double tolerance_ns = 0.0;
    double k_factor = kDefaultToleranceK;

    friend bool operator==(const PlatformCalibration &, const PlatformCalibration &) = default;
};

/// tau = k * worst within-trial sample std.
double derive_tolerance(std::span<const TrialStats> stats, double k = kDefaultToleranceK);

/// Mean of per-trial medians, with ranges and the derived tolerance.
PlatformCalibration platform_constant(std::span<const TrialStats> stats, const OperatingStateTag &tag,
                                      double k = kDefaultToleranceK);

}  // namespace pulsecal
