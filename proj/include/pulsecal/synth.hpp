// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulsecal/types.hpp"

namespace pulsecal {

enum class DistributionKind { Constant, Uniform, LogNormal, CoreTail };

/// A duration distribution. `dispersion` is the half-width in ns for Uniform and the
/// log-space sigma for LogNormal; Constant ignores it. CoreTail draws from a uniform
/// of half-width `core_ns` and, with probability `tail_weight`, from a uniform of
/// half-width `dispersion` instead: a sharp mode with wide shoulders.
struct DistributionSpec {
    DistributionKind kind = DistributionKind::Constant;
    double median_ns = 0.0;
    double dispersion = 0.0;
    double core_ns = 0.0;
    double tail_weight = 0.0;
};

enum class GlitchPlacement {
    LowPeriodPulse,     // short high pulse inside the low period after a real pulse
    SameDirectionEdge,  // duplicate rising edge `dwell_ns` after a real rise
};

struct GlitchSpec {
    std::size_t count = 0;
    Nanos dwell_ns = 0;
    GlitchPlacement placement = GlitchPlacement::LowPeriodPulse;
};

enum class FaultKind {
    StuckHigh,    // line never falls after `position` until the trial's last pulse
    DeltaOffset,  // magnitude added to every wire width (moves the falling edge)
};

struct FaultSpec {
    FaultKind kind = FaultKind::DeltaOffset;
    Nanos magnitude_ns = 0;
    std::optional<std::size_t> trial;  // nullopt: every trial
    std::optional<std::size_t> position;
};

struct ProfileConfig {
    std::size_t iterations = 5000;
    std::size_t warmup = 20;  // leading samples the analysis drops
    DistributionSpec high{DistributionKind::Constant, 10'000.0, 0.0};
    DistributionSpec low{DistributionKind::Constant, 8'000.0, 0.0};
};

struct SynthConfig {
    std::size_t trials = 10;
    std::size_t inferences_per_trial = 407;
    DistributionSpec inference{DistributionKind::LogNormal, 1'200'000.0, 0.03};
    DistributionSpec high_call{DistributionKind::Constant, 10'000.0, 0.0};
    DistributionSpec low_call{DistributionKind::Constant, 8'000.0, 0.0};
    DistributionSpec inter_inference_gap{DistributionKind::Uniform, 250'000.0, 50'000.0};
    /// Wire edges sit at rise = t0 + alpha*H and fall = t2 + beta*L.
    double rise_fraction = 1.0;
    double fall_fraction = 0.0;
    double fraction_jitter = 0.0;  // uniform half-width applied to both fractions
    /// Per-trial shift of the high-call median, evenly spread over the trials.
    double trial_offset_span_ns = 0.0;
    /// Per-trial multiplier on call-duration dispersion, evenly spread over [min, max].
    double trial_scale_min = 1.0;
    double trial_scale_max = 1.0;
    std::int64_t sample_rate_hz = 100'000'000;
    /// Trial k starts at clock_origin_ns + k * trial_period_ns; the idle remainder is the inter-trial gap.
    Nanos trial_period_ns = 10'000'000'000;
    Nanos clock_origin_ns = 1'000'000'000'000;
    /// Capture time zero is this long before the first t0.
    Nanos capture_lead_ns = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<GlitchSpec> glitches;
    std::optional<FaultSpec> fault;
    ProfileConfig profile;

    Nanos sample_quantum_ns() const;
    /// Throws ConfigError on any invariant violation.
    void validate() const;
};

struct SynthTrial {
    std::vector<InferenceRecord> records;
    std::vector<EdgeEvent> events;  // capture time, on the sample grid
    std::vector<Nanos> high_ns;     // drawn call durations, for bound checks
    std::vector<Nanos> low_ns;
};

/// One trial, independent of the others: a fixed start slot and its own random stream.
/// Every rise lies in [t0, t1] and every fall in [t2, t3] unless a fault says otherwise.
SynthTrial generate_trial(const SynthConfig &config, std::size_t trial_index);

/// Inserts glitches at seeded positions. Requires a clean alternating stream starting
/// with a rise. Throws ConfigError when a glitch cannot fit without touching real edges.
std::vector<EdgeEvent> inject_glitches(std::vector<EdgeEvent> events, std::span<const GlitchSpec> glitches,
                                       std::uint64_t seed, Nanos quantum_ns);

std::vector<ProfileSample> generate_profile(const SynthConfig &config);

struct SynthScenario {
    std::string name;
    std::string description;
    std::string platform = "other";
    std::string state_label = "calibrated-C0";
    SynthConfig config;
    nlohmann::json expected = nlohmann::json::object();  // author-declared targets
};

SynthScenario scenario_from_json(const nlohmann::json &doc);
nlohmann::json scenario_to_json(const SynthScenario &scenario);
SynthScenario load_scenario(const std::filesystem::path &path);

struct SynthDataset {
    std::vector<InferenceRecord> records;
    EdgeCapture capture;
    std::vector<ProfileSample> profile;
    nlohmann::json manifest;
};

/// Builds the whole dataset in memory. Deterministic for a given scenario.
SynthDataset build_dataset(const SynthScenario &scenario);

struct DatasetFiles {
    std::filesystem::path capture;
    std::filesystem::path orchestrator_log;
    std::filesystem::path profile_log;
    std::filesystem::path manifest;
};

inline constexpr const char *kCaptureFile = "capture.csv";
inline constexpr const char *kOrchestratorFile = "orchestrator.jsonl";
inline constexpr const char *kProfileFile = "profile.csv";
inline constexpr const char *kManifestFile = "manifest.json";

DatasetFiles dataset_files(const std::filesystem::path &dir);

/// Writes capture, orchestrator log, profile log and the expectations manifest into `dir`.
DatasetFiles generate_dataset(const SynthScenario &scenario, const std::filesystem::path &dir);

}  // namespace pulsecal
