// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/types.hpp"

#include <cmath>

#include "pulsecal/error.hpp"

namespace pulsecal {

Nanos EdgeCapture::sample_quantum_ns() const noexcept
{
    if (sample_rate_hz <= 0) {
        return 0;
    }
    return static_cast<Nanos>(std::llround(1e9 / static_cast<double>(sample_rate_hz)));
}

bool is_alternating(const std::vector<EdgeEvent> &events) noexcept
{
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].direction == events[i - 1].direction) {
            return false;
        }
    }
    return true;
}

PlatformId PlatformId::parse(std::string_view text)
{
    PlatformId id;
    if (text == "jetson") {
        id.kind_ = Kind::Jetson;
    } else if (text == "pi") {
        id.kind_ = Kind::Pi;
    } else {
        id.kind_ = Kind::Other;
        id.other_ = std::string(text);
    }
    return id;
}

std::string PlatformId::name() const
{
    switch (kind_) {
    case Kind::Jetson:
        return "jetson";
    case Kind::Pi:
        return "pi";
    case Kind::Other:
        break;
    }
    return other_;
}

ParseError::ParseError(std::string source, std::size_t line, const std::string &message)
    : Error(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      source_(std::move(source)),
      line_(line)
{
}

}  // namespace pulsecal
