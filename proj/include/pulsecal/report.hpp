// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulsecal/gate.hpp"
#include "pulsecal/residual.hpp"
#include "pulsecal/sensitivity.hpp"
#include "pulsecal/store.hpp"

namespace pulsecal {

enum class ReportFormat { Csv, Text, Structured };

ReportFormat parse_report_format(std::string_view text);

/// Microseconds with two decimals, the report precision.
std::string us2(double ns);
/// Value rounded to report precision, in microseconds.
double round_us2(double ns);

/// A report rendered in all three formats.
struct Report {
    std::string text;
    std::string csv;
    nlohmann::json structured;

    std::string render(ReportFormat format) const;
};

Report calibration_report(const PlatformCalibration &calibration, std::span<const TrialStats> stats);
Report sweep_report(std::span<const SweepRow> rows, std::size_t expected_count, std::string_view platform);
Report profile_report(const ProfileComparison &comparison, std::string_view platform);
Report drift_report_view(const DriftReport &report);
Report gate_report(const GateVerdict &verdict, const GateConfig &config, std::string_view platform);
Report gate_comparison_report(const GateComparison &comparison);

struct ManifestInput {
    std::string path;
    std::string digest;
};

/// Provenance for one command run; only created_at varies between identical runs.
struct RunManifest {
    std::string command;
    std::vector<ManifestInput> inputs;
    nlohmann::json config = nlohmann::json::object();
    std::string tool_version;
    std::vector<std::string> outputs;
    std::string created_at;

    nlohmann::json to_json() const;
};

std::string tool_version();

}  // namespace pulsecal
