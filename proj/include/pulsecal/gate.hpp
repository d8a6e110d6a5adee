// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pulsecal/residual.hpp"

namespace pulsecal {

enum class GateMode {
    PlatformAware,  // |delta - C_p| <= tau
    UniformRaw,     // |delta| <= tau
};

enum class GateStatistic {
    PerInference,  // every residual is tested
    TrialMedian,   // each trial's median is tested
};

GateMode parse_gate_mode(std::string_view text);
GateStatistic parse_gate_statistic(std::string_view text);
const char *to_string(GateMode m) noexcept;
const char *to_string(GateStatistic s) noexcept;

struct GateConfig {
    GateMode mode = GateMode::PlatformAware;
    double tolerance_ns = 0.0;
    std::optional<double> constant_ns;  // required for PlatformAware
    GateStatistic statistic = GateStatistic::TrialMedian;
};

struct GateVerdict {
    bool accepted = false;
    double worst_residual_ns = 0.0;  // largest |value - reference|
    double mean_residual_ns = 0.0;   // signed mean of value - reference over tested units
    double failing_fraction = 0.0;   // reported for accepted verdicts as well
    std::size_t units = 0;
    std::size_t failing = 0;
    std::string reason;
};

GateVerdict evaluate_gate(std::span<const ResidualSeries> series, const GateConfig &config);

struct GateCell {
    std::string platform;
    GateMode mode = GateMode::UniformRaw;
    double reference_ns = 0.0;
    GateVerdict verdict;
    /// tau minus the magnitude of the mean residual: how much room the gate leaves around
    /// the platform's typical value. Negative when the typical value already fails.
    double margin_ns = 0.0;
};

struct GateComparison {
    double tau_ns = 0.0;
    GateStatistic statistic = GateStatistic::TrialMedian;
    std::vector<GateCell> cells;  // uniform jetson, uniform pi, aware jetson, aware pi
};

struct PlatformConstants {
    double jetson_ns = 0.0;
    double pi_ns = 0.0;
};

/// Uniform-vs-platform-aware gates over both platforms with one tau.
GateComparison gate_comparison(std::span<const ResidualSeries> jetson, std::span<const ResidualSeries> pi,
                               double tau_ns, const PlatformConstants &constants,
                               GateStatistic statistic = GateStatistic::TrialMedian);

}  // namespace pulsecal
