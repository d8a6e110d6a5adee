// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/residual.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

PerfConvention parse_perf_convention(std::string_view text)
{
    if (text == "outer") {
        return PerfConvention::Outer;
    }
    if (text == "inner") {
        return PerfConvention::Inner;
    }
    throw ConfigError(fmt::format("unknown perf convention '{}' (expected outer or inner)", text));
}

const char *to_string(PerfConvention c) noexcept
{
    return c == PerfConvention::Outer ? "outer" : "inner";
}

ResidualSeries compute_deltas(const AlignedTrial &trial, PerfConvention convention)
{
    ResidualSeries series;
    series.trial_id = trial.trial_id;
    series.convention = convention;
    const auto items = trial.effective();
    series.deltas_ns.reserve(items.size());
    for (const auto &item : items) {
        const Nanos perf =
            convention == PerfConvention::Outer ? item.record.outer_interval() : item.record.inner_interval();
        series.deltas_ns.push_back(item.pulse.width_ns() - perf);
    }
    return series;
}

double median_ns(std::vector<Nanos> values)
{
    if (values.empty()) {
        throw ConfigError("median of an empty series");
    }
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) {
        return static_cast<double>(*mid);
    }
    const Nanos upper = *mid;
    const Nanos lower = *std::max_element(values.begin(), mid);
    // Sum of two ns values stays far below 2^53, so the halving is exact.
    return static_cast<double>(lower + upper) / 2.0;
}

TrialStats trial_stats(const ResidualSeries &series)
{
    if (series.deltas_ns.empty()) {
        throw ConfigError(fmt::format("trial '{}' has no residuals", series.trial_id));
    }
    TrialStats stats;
    stats.trial_id = series.trial_id;
    stats.n = series.deltas_ns.size();
    const auto [lo, hi] = std::minmax_element(series.deltas_ns.begin(), series.deltas_ns.end());
    stats.min_ns = *lo;
    stats.max_ns = *hi;
    stats.median_ns = median_ns(series.deltas_ns);
    if (stats.n >= 2) {
        long double mean = 0.0L;
        for (const auto d : series.deltas_ns) {
            mean += static_cast<long double>(d);
        }
        mean /= static_cast<long double>(stats.n);
        long double ss = 0.0L;
        for (const auto d : series.deltas_ns) {
            const auto dev = static_cast<long double>(d) - mean;
            ss += dev * dev;
        }
        stats.sample_std_ns = static_cast<double>(std::sqrt(ss / static_cast<long double>(stats.n - 1)));
    }
    return stats;
}

double derive_tolerance(std::span<const TrialStats> stats, double k)
{
    if (!(k > 0.0)) {
        throw ConfigError("tolerance factor k must be > 0");
    }
    if (stats.empty()) {
        throw ConfigError("tolerance derivation needs at least one trial");
    }
    std::optional<double> worst;
    for (const auto &s : stats) {
        if (s.sample_std_ns) {
            worst = std::max(worst.value_or(0.0), *s.sample_std_ns);
        }
    }
    if (!worst) {
        throw ConfigError("tolerance derivation needs a trial with at least 2 residuals");
    }
    return k * *worst;
}

PlatformCalibration platform_constant(std::span<const TrialStats> stats, const OperatingStateTag &tag, double k)
{
    if (stats.empty()) {
        throw ConfigError("platform constant needs at least one trial");
    }
    PlatformCalibration cal;
    cal.tag = tag;
    cal.k_factor = k;
    cal.n_trials = stats.size();
    // Fixed trial order: the mean is accumulated the same way on every run.
    long double sum = 0.0L;
    bool first_std = true;
    for (const auto &s : stats) {
        cal.trial_medians_ns.push_back(s.median_ns);
        sum += s.median_ns;
        if (s.sample_std_ns) {
            if (first_std) {
                cal.std_range_ns = {*s.sample_std_ns, *s.sample_std_ns};
                first_std = false;
            } else {
                cal.std_range_ns.first = std::min(cal.std_range_ns.first, *s.sample_std_ns);
                cal.std_range_ns.second = std::max(cal.std_range_ns.second, *s.sample_std_ns);
            }
        }
    }
    cal.c_p_ns = static_cast<double>(sum / static_cast<long double>(stats.size()));
    const auto [lo, hi] = std::minmax_element(cal.trial_medians_ns.begin(), cal.trial_medians_ns.end());
    cal.median_range_ns = {*lo, *hi};
    cal.tolerance_ns = derive_tolerance(stats, k);
    return cal;
}

}  // namespace pulsecal
