// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pulsecal/types.hpp"

namespace pulsecal {

enum class CaptureFormat {
    NativeNs,         // "timestamp_ns,direction" with R/F directions
    AnalyzerSeconds,  // "time_s,level" exported by the analyzer software
};

CaptureFormat parse_capture_format(std::string_view text);

struct CaptureOptions {
    /// Used when the file carries no sample-rate metadata (always for analyzer exports).
    std::int64_t sample_rate_hz = 100'000'000;
    /// Defaults to the file name for path overloads.
    std::string source_id;
};

struct CaptureParse {
    EdgeCapture capture;
    /// Off-grid timestamps and similar non-fatal findings.
    std::vector<std::string> warnings;
};

CaptureParse parse_edge_capture(std::istream &in, CaptureFormat format, const CaptureOptions &options = {});
CaptureParse parse_edge_capture(const std::filesystem::path &path, CaptureFormat format, CaptureOptions options = {});

/// Writes the native format, including sample-rate and source metadata comments.
void write_edge_capture(std::ostream &out, const EdgeCapture &capture);

/// Orchestrator log: one JSON object per line with trial_id, index, t0_ns..t3_ns.
/// Returned records are grouped by trial (first-appearance order) and sorted by index.
std::vector<InferenceRecord> parse_orchestrator_log(std::istream &in, std::string_view source = "<stream>");
std::vector<InferenceRecord> parse_orchestrator_log(const std::filesystem::path &path);
void write_orchestrator_log(std::ostream &out, std::span<const InferenceRecord> records);

/// Splits grouped records into per-trial lists, keeping order.
std::vector<TrialRecords> group_by_trial(std::span<const InferenceRecord> records);

/// Profile log: CSV "iteration,high_ns,low_ns".
std::vector<ProfileSample> parse_profile_log(std::istream &in, std::string_view source = "<stream>");
std::vector<ProfileSample> parse_profile_log(const std::filesystem::path &path);
void write_profile_log(std::ostream &out, std::span<const ProfileSample> samples);

/// Exact decimal-seconds to nanoseconds, rounding half to even. Accepts an optional exponent.
/// Throws std::invalid_argument on malformed text.
Nanos decimal_seconds_to_ns(std::string_view text);

}  // namespace pulsecal
