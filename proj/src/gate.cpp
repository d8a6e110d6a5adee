// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/gate.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

GateMode parse_gate_mode(std::string_view text)
{
    if (text == "platform-aware" || text == "platform_aware") {
        return GateMode::PlatformAware;
    }
    if (text == "uniform" || text == "uniform-raw" || text == "uniform_raw") {
        return GateMode::UniformRaw;
    }
    throw ConfigError(fmt::format("unknown gate mode '{}'", text));
}

GateStatistic parse_gate_statistic(std::string_view text)
{
    if (text == "trial-median" || text == "trial_median") {
        return GateStatistic::TrialMedian;
    }
    if (text == "per-inference" || text == "per_inference") {
        return GateStatistic::PerInference;
    }
    throw ConfigError(fmt::format("unknown gate statistic '{}'", text));
}

const char *to_string(GateMode m) noexcept
{
    return m == GateMode::PlatformAware ? "platform-aware" : "uniform";
}

const char *to_string(GateStatistic s) noexcept
{
    return s == GateStatistic::TrialMedian ? "trial-median" : "per-inference";
}

GateVerdict evaluate_gate(std::span<const ResidualSeries> series, const GateConfig &config)
{
    if (series.empty()) {
        throw ConfigError("gate needs at least one residual series");
    }
    if (!(config.tolerance_ns >= 0.0)) {
        throw ConfigError("gate tolerance must be >= 0");
    }
    double reference = 0.0;
    if (config.mode == GateMode::PlatformAware) {
        if (!config.constant_ns) {
            throw ConfigError("platform-aware gate requires a platform constant");
        }
        reference = *config.constant_ns;
    }

    GateVerdict v;
    long double sum = 0.0L;
    std::string first_failure;
    auto test = [&](double value, const std::string &label) {
        const double residual = value - reference;
        const double magnitude = std::abs(residual);
        sum += residual;
        ++v.units;
        if (v.units == 1 || magnitude > v.worst_residual_ns) {
            v.worst_residual_ns = magnitude;
        }
        if (magnitude > config.tolerance_ns) {
            if (v.failing++ == 0) {
                first_failure = label;
            }
        }
    };
    for (const auto &s : series) {
        if (config.statistic == GateStatistic::TrialMedian) {
            test(median_ns(s.deltas_ns), fmt::format("trial '{}' median", s.trial_id));
        } else {
            for (std::size_t i = 0; i < s.deltas_ns.size(); ++i) {
                test(static_cast<double>(s.deltas_ns[i]), fmt::format("trial '{}' residual #{}", s.trial_id, i));
            }
        }
    }
    if (v.units == 0) {
        throw ConfigError("gate has no residuals to test");
    }
    v.mean_residual_ns = static_cast<double>(sum / static_cast<long double>(v.units));
    v.failing_fraction = static_cast<double>(v.failing) / static_cast<double>(v.units);
    v.accepted = v.failing == 0;
    const auto bound = config.mode == GateMode::PlatformAware ? "|delta - C_p|" : "|delta|";
    if (v.accepted) {
        v.reason = fmt::format("all {} {} within {} <= {:.2f} us (worst {:.2f} us)", v.units,
                               to_string(config.statistic), bound, config.tolerance_ns / 1000.0,
                               v.worst_residual_ns / 1000.0);
    } else {
        v.reason = fmt::format("{} of {} {} exceed {} <= {:.2f} us (worst {:.2f} us, first: {})", v.failing, v.units,
                               to_string(config.statistic), bound, config.tolerance_ns / 1000.0,
                               v.worst_residual_ns / 1000.0, first_failure);
    }
    return v;
}

GateComparison gate_comparison(std::span<const ResidualSeries> jetson, std::span<const ResidualSeries> pi,
                               double tau_ns, const PlatformConstants &constants, GateStatistic statistic)
{
    if (jetson.empty() || pi.empty()) {
        throw ConfigError("gate comparison needs both platform datasets");
    }
    GateComparison cmp;
    cmp.tau_ns = tau_ns;
    cmp.statistic = statistic;
    auto cell = [&](const char *platform, std::span<const ResidualSeries> series, GateMode mode, double constant) {
        GateConfig cfg{mode, tau_ns, constant, statistic};
        GateCell c;
        c.platform = platform;
        c.mode = mode;
        c.reference_ns = mode == GateMode::PlatformAware ? constant : 0.0;
        c.verdict = evaluate_gate(series, cfg);
        c.margin_ns = tau_ns - std::abs(c.verdict.mean_residual_ns);
        cmp.cells.push_back(std::move(c));
    };
    cell("jetson", jetson, GateMode::UniformRaw, constants.jetson_ns);
    cell("pi", pi, GateMode::UniformRaw, constants.pi_ns);
    cell("jetson", jetson, GateMode::PlatformAware, constants.jetson_ns);
    cell("pi", pi, GateMode::PlatformAware, constants.pi_ns);
    return cmp;
}

}  // namespace pulsecal
