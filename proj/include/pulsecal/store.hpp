// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulsecal/residual.hpp"

namespace pulsecal {

inline constexpr int kStoreSchemaVersion = 1;
inline constexpr double kDefaultDriftThresholdNs = 2000.0;
inline constexpr const char *kStoreEnvVar = "PULSECAL_STORE";

struct SessionEntry {
    OperatingStateTag tag;
    PlatformCalibration calibration;
    std::string created_at;  // UTC, YYYY-MM-DDTHH:MM:SSZ
    std::string source_digest;

    std::string key() const;

    friend bool operator==(const SessionEntry &, const SessionEntry &) = default;
};

struct DriftReport {
    std::string platform;
    std::vector<std::string> session_ids;  // creation order
    std::vector<double> session_constants_ns;
    double range_ns = 0.0;
    double threshold_ns = kDefaultDriftThresholdNs;
    bool flagged = false;
};

enum class LookupPolicy { LatestSession, PooledMean };

LookupPolicy parse_lookup_policy(std::string_view text);

/// Current UTC time in the store's timestamp format.
std::string utc_now_iso8601();
bool is_valid_timestamp(std::string_view text);

/// Per-platform, per-session calibrations kept as one versioned JSON document.
class CalibrationStore {
public:
    CalibrationStore() = default;

    /// A missing file is an empty store.
    static CalibrationStore load(const std::filesystem::path &path);
    /// Writes through a temporary file and rename so readers never see a partial document.
    void save(const std::filesystem::path &path) const;

    nlohmann::json to_json() const;
    static CalibrationStore from_json(const nlohmann::json &doc);

    /// Returns the entry key. Re-recording identical content is a no-op; the same key
    /// with a different digest or calibration throws StoreConflict.
    std::string record_session(const SessionEntry &entry);

    const std::vector<SessionEntry> &entries() const noexcept { return entries_; }
    /// Ordered by (created_at, session_id).
    std::vector<SessionEntry> sessions_for(const PlatformId &platform) const;

    DriftReport drift_report(const PlatformId &platform, double threshold_ns = kDefaultDriftThresholdNs) const;
    PlatformCalibration lookup_constant(const PlatformId &platform,
                                        LookupPolicy policy = LookupPolicy::LatestSession) const;

private:
    std::vector<SessionEntry> entries_;  // insertion order
};

/// Load-modify-save under an exclusive lock on "<path>.lock"; writers are serialized.
void update_store(const std::filesystem::path &path, const std::function<void(CalibrationStore &)> &mutate);

}  // namespace pulsecal
