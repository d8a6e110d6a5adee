// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pulsecal {

/// Integer nanoseconds. Every timestamp and duration inside the toolkit uses this.
using Nanos = std::int64_t;

inline constexpr double kNanosPerMicro = 1000.0;

enum class Direction : std::uint8_t { Rising, Falling };

constexpr Direction opposite(Direction d) noexcept
{
    return d == Direction::Rising ? Direction::Falling : Direction::Rising;
}

constexpr char direction_code(Direction d) noexcept
{
    return d == Direction::Rising ? 'R' : 'F';
}

/// One wire-level transition seen by the logic analyzer.
struct EdgeEvent {
    Nanos timestamp = 0;  // from capture start
    Direction direction = Direction::Rising;

    friend bool operator==(const EdgeEvent &, const EdgeEvent &) = default;
};

struct EdgeCapture {
    std::vector<EdgeEvent> events;  // strictly increasing timestamps
    std::int64_t sample_rate_hz = 100'000'000;
    std::string source_id;
    /// False when two consecutive events share a direction. Pairing reports it.
    bool alternating = true;

    /// Sample period in ns, round(1e9 / rate); 0 when the rate is unknown.
    Nanos sample_quantum_ns() const noexcept;
};

/// Recomputes the alternating flag from the event list.
bool is_alternating(const std::vector<EdgeEvent> &events) noexcept;

/// Four monotonic software-clock timestamps bracketing one inference.
struct InferenceRecord {
    std::string trial_id;
    std::uint64_t index = 0;
    Nanos t0 = 0;  // before gpio.high
    Nanos t1 = 0;  // after gpio.high, before infer
    Nanos t2 = 0;  // after infer, before gpio.low
    Nanos t3 = 0;  // after gpio.low

    Nanos outer_interval() const noexcept { return t3 - t0; }
    Nanos inner_interval() const noexcept { return t2 - t1; }

    friend bool operator==(const InferenceRecord &, const InferenceRecord &) = default;
};

/// Records of one trial, ordered by index.
struct TrialRecords {
    std::string trial_id;
    std::vector<InferenceRecord> records;
};

struct ProfileSample {
    std::uint64_t iteration = 0;
    Nanos high_ns = 0;
    Nanos low_ns = 0;

    friend bool operator==(const ProfileSample &, const ProfileSample &) = default;
};

/// Platform identifier; anything other than the two known boards keeps its name.
class PlatformId {
public:
    enum class Kind : std::uint8_t { Jetson, Pi, Other };

    PlatformId() = default;
    static PlatformId parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    std::string name() const;
    bool empty() const noexcept { return kind_ == Kind::Other && other_.empty(); }

    friend bool operator==(const PlatformId &, const PlatformId &) = default;

private:
    Kind kind_ = Kind::Other;
    std::string other_;
};

struct OperatingStateTag {
    PlatformId platform;
    std::string state_label = "calibrated-C0";
    std::string session_id;
    std::string captured_at;

    friend bool operator==(const OperatingStateTag &, const OperatingStateTag &) = default;
};

}  // namespace pulsecal
