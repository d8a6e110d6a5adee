// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pulsecal/pipeline.hpp"
#include "pulsecal/synth.hpp"

namespace testsupport {

inline std::filesystem::path scenario_path(const std::string &name)
{
    return std::filesystem::path(PULSECAL_SCENARIO_DIR) / (name + ".json");
}

inline pulsecal::SynthScenario scenario(const std::string &name)
{
    return pulsecal::load_scenario(scenario_path(name));
}

inline pulsecal::EdgeCapture capture_of(std::vector<pulsecal::EdgeEvent> events)
{
    pulsecal::EdgeCapture c;
    c.events = std::move(events);
    c.alternating = pulsecal::is_alternating(c.events);
    return c;
}

// Strictly increasing timestamps with random directions; `alternating` forces R/F order.
inline std::vector<pulsecal::EdgeEvent> random_edges(std::mt19937_64 &rng, std::size_t n, bool alternating,
                                                     pulsecal::Nanos max_step = 120)
{
    std::uniform_int_distribution<pulsecal::Nanos> step(1, max_step);
    std::bernoulli_distribution coin(0.5);
    std::vector<pulsecal::EdgeEvent> out;
    pulsecal::Nanos t = step(rng);
    auto dir = coin(rng) ? pulsecal::Direction::Rising : pulsecal::Direction::Falling;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({t, dir});
        t += step(rng);
        dir = alternating || coin(rng) ? pulsecal::opposite(dir) : dir;
    }
    return out;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string &tag)
    {
        path = std::filesystem::temp_directory_path() /
               ("pulsecal-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
};

}  // namespace testsupport
