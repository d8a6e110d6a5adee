// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

#include "pulsecal/digest.hpp"
#include "pulsecal/error.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/pulse.hpp"
#include "pulsecal/sensitivity.hpp"

namespace pulsecal {

namespace {

// Stream ids keep trials, glitches and the profile on independent sequences.
constexpr std::uint64_t kPermutationStream = 0x5045524dULL;
constexpr std::uint64_t kGlitchStream = 0x474c4954ULL;
constexpr std::uint64_t kProfileStream = 0x50524f46ULL;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// std::mt19937_64 output is fixed by the standard; the std distributions are not,
// so the variates below are derived by hand to keep files byte-identical everywhere.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double symmetric() { return 2.0 * uniform01() - 1.0; }

    double normal()
    {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

private:
    std::mt19937_64 engine_;
};

double draw(const DistributionSpec &spec, double scale, Rng &rng)
{
    switch (spec.kind) {
    case DistributionKind::Constant:
        return spec.median_ns;
    case DistributionKind::Uniform:
        return spec.median_ns + scale * spec.dispersion * rng.symmetric();
    case DistributionKind::LogNormal:
        return spec.median_ns * std::exp(scale * spec.dispersion * rng.normal());
    case DistributionKind::CoreTail: {
        const bool tail = rng.uniform01() < spec.tail_weight;
        return spec.median_ns + scale * (tail ? spec.dispersion : spec.core_ns) * rng.symmetric();
    }
    }
    return spec.median_ns;
}

Nanos draw_ns(const DistributionSpec &spec, double scale, double shift, Nanos floor_ns, Rng &rng)
{
    return std::max(floor_ns, static_cast<Nanos>(std::llround(draw(spec, scale, rng) + shift)));
}

Nanos floor_to(Nanos t, Nanos q)
{
    const Nanos r = t % q;
    return r < 0 ? t - r - q : t - r;
}

Nanos ceil_to(Nanos t, Nanos q)
{
    const Nanos f = floor_to(t, q);
    return f == t ? t : f + q;
}

// Evenly spaced values over [lo, hi], assigned to trials in a seeded order.
std::vector<double> spread(double lo, double hi, std::size_t n, std::uint64_t seed, std::uint64_t salt)
{
    std::vector<double> values(n, lo);
    for (std::size_t j = 0; j < n && n > 1; ++j) {
        values[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
    }
    if (n == 1) {
        values[0] = (lo + hi) / 2.0;
    }
    Rng rng(seed, kPermutationStream + salt);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(values[i - 1], values[rng.index(i)]);
    }
    return values;
}

void check_distribution(const DistributionSpec &d, const char *name)
{
    if (!(d.median_ns > 0.0) || !std::isfinite(d.median_ns)) {
        throw ConfigError(fmt::format("{}: median must be > 0", name));
    }
    if (!(d.dispersion >= 0.0) || !std::isfinite(d.dispersion)) {
        throw ConfigError(fmt::format("{}: dispersion must be >= 0", name));
    }
    if ((d.kind == DistributionKind::Uniform || d.kind == DistributionKind::CoreTail) &&
        d.dispersion >= d.median_ns) {
        throw ConfigError(fmt::format("{}: uniform half-width must be below the median", name));
    }
    if (d.kind == DistributionKind::CoreTail &&
        (!(d.core_ns >= 0.0) || d.core_ns > d.dispersion || !(d.tail_weight >= 0.0 && d.tail_weight <= 1.0))) {
        throw ConfigError(fmt::format("{}: core_tail needs 0 <= core_ns <= dispersion and tail_weight in [0, 1]", name));
    }
}

// ---- JSON mapping --------------------------------------------------------

const char *to_string(DistributionKind k)
{
    switch (k) {
    case DistributionKind::Constant:
        return "constant";
    case DistributionKind::Uniform:
        return "uniform";
    case DistributionKind::LogNormal:
        return "lognormal";
    case DistributionKind::CoreTail:
        return "core_tail";
    }
    return "?";
}

DistributionSpec distribution_from_json(const nlohmann::json &j)
{
    DistributionSpec d;
    const auto kind = j.value("kind", std::string("constant"));
    if (kind == "constant") {
        d.kind = DistributionKind::Constant;
    } else if (kind == "uniform") {
        d.kind = DistributionKind::Uniform;
    } else if (kind == "lognormal") {
        d.kind = DistributionKind::LogNormal;
    } else if (kind == "core_tail") {
        d.kind = DistributionKind::CoreTail;
        d.core_ns = j.value("core_ns", 0.0);
        d.tail_weight = j.value("tail_weight", 0.0);
    } else {
        throw ConfigError(fmt::format("unknown distribution kind '{}'", kind));
    }
    d.median_ns = j.at("median_ns").get<double>();
    d.dispersion = j.value("dispersion", 0.0);
    return d;
}

nlohmann::json distribution_to_json(const DistributionSpec &d)
{
    nlohmann::json j = {{"kind", to_string(d.kind)}, {"median_ns", d.median_ns}, {"dispersion", d.dispersion}};
    if (d.kind == DistributionKind::CoreTail) {
        j["core_ns"] = d.core_ns;
        j["tail_weight"] = d.tail_weight;
    }
    return j;
}

const char *to_string(GlitchPlacement p)
{
    return p == GlitchPlacement::LowPeriodPulse ? "low_period_pulse" : "same_direction_edge";
}

const char *to_string(FaultKind k)
{
    return k == FaultKind::StuckHigh ? "stuck_high" : "delta_offset";
}

template <typename T>
void read_opt(const nlohmann::json &j, const char *key, T &out)
{
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

SynthConfig config_from_json(const nlohmann::json &j)
{
    SynthConfig c;
    read_opt(j, "trials", c.trials);
    read_opt(j, "inferences_per_trial", c.inferences_per_trial);
    if (j.contains("inference_ns")) {
        c.inference = distribution_from_json(j.at("inference_ns"));
    }
    if (j.contains("high_call_ns")) {
        c.high_call = distribution_from_json(j.at("high_call_ns"));
    }
    if (j.contains("low_call_ns")) {
        c.low_call = distribution_from_json(j.at("low_call_ns"));
    }
    if (j.contains("inter_inference_gap_ns")) {
        c.inter_inference_gap = distribution_from_json(j.at("inter_inference_gap_ns"));
    }
    read_opt(j, "rise_fraction", c.rise_fraction);
    read_opt(j, "fall_fraction", c.fall_fraction);
    read_opt(j, "fraction_jitter", c.fraction_jitter);
    read_opt(j, "trial_offset_span_ns", c.trial_offset_span_ns);
    if (const auto it = j.find("trial_scale"); it != j.end()) {
        c.trial_scale_min = it->at(0).get<double>();
        c.trial_scale_max = it->at(1).get<double>();
    }
    read_opt(j, "sample_rate_hz", c.sample_rate_hz);
    read_opt(j, "trial_period_ns", c.trial_period_ns);
    read_opt(j, "clock_origin_ns", c.clock_origin_ns);
    read_opt(j, "capture_lead_ns", c.capture_lead_ns);
    read_opt(j, "seed", c.seed);
    if (const auto it = j.find("glitches"); it != j.end()) {
        for (const auto &g : *it) {
            GlitchSpec spec;
            spec.count = g.at("count").get<std::size_t>();
            spec.dwell_ns = g.at("dwell_ns").get<Nanos>();
            const auto placement = g.at("placement").get<std::string>();
            if (placement == "low_period_pulse") {
                spec.placement = GlitchPlacement::LowPeriodPulse;
            } else if (placement == "same_direction_edge") {
                spec.placement = GlitchPlacement::SameDirectionEdge;
            } else {
                throw ConfigError(fmt::format("unknown glitch placement '{}'", placement));
            }
            c.glitches.push_back(spec);
        }
    }
    if (const auto it = j.find("fault"); it != j.end() && !it->is_null()) {
        FaultSpec f;
        const auto kind = it->at("kind").get<std::string>();
        if (kind == "stuck_high") {
            f.kind = FaultKind::StuckHigh;
        } else if (kind == "delta_offset") {
            f.kind = FaultKind::DeltaOffset;
        } else {
            throw ConfigError(fmt::format("unknown fault kind '{}'", kind));
        }
        f.magnitude_ns = it->value("magnitude_ns", Nanos{0});
        if (it->contains("trial") && !it->at("trial").is_null()) {
            f.trial = it->at("trial").get<std::size_t>();
        }
        if (it->contains("position") && !it->at("position").is_null()) {
            f.position = it->at("position").get<std::size_t>();
        }
        c.fault = f;
    }
    if (const auto it = j.find("profile"); it != j.end()) {
        read_opt(*it, "iterations", c.profile.iterations);
        read_opt(*it, "warmup", c.profile.warmup);
        if (it->contains("high_ns")) {
            c.profile.high = distribution_from_json(it->at("high_ns"));
        }
        if (it->contains("low_ns")) {
            c.profile.low = distribution_from_json(it->at("low_ns"));
        }
    }
    return c;
}

nlohmann::json config_to_json(const SynthConfig &c)
{
    nlohmann::json glitches = nlohmann::json::array();
    for (const auto &g : c.glitches) {
        glitches.push_back({{"count", g.count}, {"dwell_ns", g.dwell_ns}, {"placement", to_string(g.placement)}});
    }
    nlohmann::json fault = nullptr;
    if (c.fault) {
        fault = {{"kind", to_string(c.fault->kind)}, {"magnitude_ns", c.fault->magnitude_ns}};
        fault["trial"] = c.fault->trial ? nlohmann::json(*c.fault->trial) : nlohmann::json(nullptr);
        fault["position"] = c.fault->position ? nlohmann::json(*c.fault->position) : nlohmann::json(nullptr);
    }
    return {
        {"trials", c.trials},
        {"inferences_per_trial", c.inferences_per_trial},
        {"inference_ns", distribution_to_json(c.inference)},
        {"high_call_ns", distribution_to_json(c.high_call)},
        {"low_call_ns", distribution_to_json(c.low_call)},
        {"inter_inference_gap_ns", distribution_to_json(c.inter_inference_gap)},
        {"rise_fraction", c.rise_fraction},
        {"fall_fraction", c.fall_fraction},
        {"fraction_jitter", c.fraction_jitter},
        {"trial_offset_span_ns", c.trial_offset_span_ns},
        {"trial_scale", {c.trial_scale_min, c.trial_scale_max}},
        {"sample_rate_hz", c.sample_rate_hz},
        {"trial_period_ns", c.trial_period_ns},
        {"clock_origin_ns", c.clock_origin_ns},
        {"capture_lead_ns", c.capture_lead_ns},
        {"seed", c.seed},
        {"glitches", glitches},
        {"fault", fault},
        {"profile",
         {{"iterations", c.profile.iterations},
          {"warmup", c.profile.warmup},
          {"high_ns", distribution_to_json(c.profile.high)},
          {"low_ns", distribution_to_json(c.profile.low)}}},
    };
}

// Pair counts and pass/fail per threshold, from the glitch and fault specs alone.
nlohmann::json analytic_sweep(const SynthConfig &c)
{
    const auto base = c.trials * c.inferences_per_trial;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto t : kDefaultSweepThresholdsNs) {
        std::size_t pairs = base;
        std::size_t violations = 0;
        for (const auto &g : c.glitches) {
            if (g.placement == GlitchPlacement::LowPeriodPulse && g.dwell_ns >= t) {
                pairs += g.count;
            }
            if (g.placement == GlitchPlacement::SameDirectionEdge && t == 0) {
                violations += g.count;
            }
        }
        if (c.fault && c.fault->kind == FaultKind::StuckHigh) {
            const auto pos = c.fault->position.value_or(c.inferences_per_trial / 2);
            pairs -= c.inferences_per_trial - 1 - pos;
        }
        const bool pass = pairs == base && violations == 0;
        rows.push_back({{"threshold_ns", t}, {"pair_count", pairs}, {"status", pass ? "pass" : "fail"}});
    }
    return rows;
}

}  // namespace

Nanos SynthConfig::sample_quantum_ns() const
{
    if (sample_rate_hz <= 0) {
        throw ConfigError("sample_rate_hz must be > 0");
    }
    return std::max<Nanos>(1, static_cast<Nanos>(std::llround(1e9 / static_cast<double>(sample_rate_hz))));
}

void SynthConfig::validate() const
{
    if (trials == 0 || inferences_per_trial == 0) {
        throw ConfigError("trials and inferences_per_trial must be > 0");
    }
    check_distribution(inference, "inference_ns");
    check_distribution(high_call, "high_call_ns");
    check_distribution(low_call, "low_call_ns");
    check_distribution(inter_inference_gap, "inter_inference_gap_ns");
    check_distribution(profile.high, "profile.high_ns");
    check_distribution(profile.low, "profile.low_ns");
    for (const double f : {rise_fraction, fall_fraction}) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ConfigError("edge fractions must lie in [0, 1]");
        }
    }
    if (!(fraction_jitter >= 0.0 && fraction_jitter <= 1.0)) {
        throw ConfigError("fraction_jitter must lie in [0, 1]");
    }
    if (!(trial_scale_min > 0.0 && trial_scale_max >= trial_scale_min)) {
        throw ConfigError("trial_scale must satisfy 0 < min <= max");
    }
    if (!(trial_offset_span_ns >= 0.0)) {
        throw ConfigError("trial_offset_span_ns must be >= 0");
    }
    const auto q = sample_quantum_ns();
    if (clock_origin_ns % q != 0 || capture_lead_ns % q != 0 || capture_lead_ns < 0) {
        throw ConfigError("clock_origin_ns and capture_lead_ns must be nonnegative multiples of the sample period");
    }
    if (trial_period_ns <= 0) {
        throw ConfigError("trial_period_ns must be > 0");
    }
    for (const auto &g : glitches) {
        if (g.dwell_ns <= 0 || g.dwell_ns % q != 0) {
            throw ConfigError(fmt::format("glitch dwell {} ns must be a positive multiple of {} ns", g.dwell_ns, q));
        }
    }
    if (fault) {
        if (fault->kind == FaultKind::DeltaOffset && fault->magnitude_ns % q != 0) {
            throw ConfigError("delta_offset magnitude must be a multiple of the sample period");
        }
        if (fault->trial && *fault->trial >= trials) {
            throw ConfigError("fault trial index out of range");
        }
        if (fault->kind == FaultKind::StuckHigh &&
            fault->position.value_or(inferences_per_trial / 2) + 1 >= inferences_per_trial) {
            throw ConfigError("stuck_high position must leave at least one later pulse in the trial");
        }
    }
    if (profile.iterations == 0) {
        throw ConfigError("profile iterations must be > 0");
    }
}

SynthTrial generate_trial(const SynthConfig &config, std::size_t trial_index)
{
    config.validate();
    if (trial_index >= config.trials) {
        throw ConfigError("trial index out of range");
    }
    const Nanos q = config.sample_quantum_ns();
    const auto offsets = spread(-config.trial_offset_span_ns / 2.0, config.trial_offset_span_ns / 2.0,
                                config.trials, config.seed, 1);
    const auto scales = spread(config.trial_scale_min, config.trial_scale_max, config.trials, config.seed, 2);
    const double offset = offsets[trial_index];
    const double scale = scales[trial_index];

    Rng rng(config.seed, trial_index + 1);
    const Nanos capture_origin = config.clock_origin_ns - config.capture_lead_ns;
    const Nanos start = config.clock_origin_ns + static_cast<Nanos>(trial_index) * config.trial_period_ns;
    const auto trial_id = fmt::format("T{:02}", trial_index + 1);

    SynthTrial out;
    out.records.reserve(config.inferences_per_trial);
    std::vector<PulsePair> pulses;
    pulses.reserve(config.inferences_per_trial);
    Nanos cursor = start;
    for (std::size_t i = 0; i < config.inferences_per_trial; ++i) {
        const Nanos high = draw_ns(config.high_call, scale, offset, q, rng);
        const Nanos low = draw_ns(config.low_call, scale, 0.0, q, rng);
        const Nanos infer = draw_ns(config.inference, 1.0, 0.0, q, rng);
        const Nanos gap = draw_ns(config.inter_inference_gap, 1.0, 0.0, q, rng);
        const double alpha = std::clamp(config.rise_fraction + config.fraction_jitter * rng.symmetric(), 0.0, 1.0);
        const double beta = std::clamp(config.fall_fraction + config.fraction_jitter * rng.symmetric(), 0.0, 1.0);

        InferenceRecord r{trial_id, i, cursor, cursor + high, cursor + high + infer, cursor + high + infer + low};
        // The analyzer reports an edge at the first sample at or after it; clamp back
        // into the call window when rounding would cross its boundary.
        Nanos rise = ceil_to(r.t0 + static_cast<Nanos>(std::llround(alpha * static_cast<double>(high))), q);
        if (rise > r.t1) {
            rise = floor_to(r.t1, q);
        }
        Nanos fall = floor_to(r.t2 + static_cast<Nanos>(std::llround(beta * static_cast<double>(low))), q);
        if (fall < r.t2) {
            fall = ceil_to(r.t2, q);
        }
        pulses.push_back({rise, fall});
        out.high_ns.push_back(high);
        out.low_ns.push_back(low);
        out.records.push_back(std::move(r));
        cursor = out.records.back().t3 + gap;
    }
    if (cursor - start >= config.trial_period_ns) {
        throw ConfigError(fmt::format("trial {} runs {} ns, longer than trial_period_ns", trial_index, cursor - start));
    }

    if (config.fault && (!config.fault->trial || *config.fault->trial == trial_index)) {
        const auto &fault = *config.fault;
        if (fault.kind == FaultKind::DeltaOffset) {
            for (std::size_t i = 0; i < pulses.size(); ++i) {
                pulses[i].fall_ns += fault.magnitude_ns;
                const bool overlaps_next = i + 1 < pulses.size() && pulses[i].fall_ns >= pulses[i + 1].rise_ns;
                if (pulses[i].fall_ns <= pulses[i].rise_ns || overlaps_next) {
                    throw ConfigError("delta_offset magnitude pushes a falling edge out of its pulse slot");
                }
            }
        } else {
            const auto pos = fault.position.value_or(config.inferences_per_trial / 2);
            const Nanos last_fall = pulses.back().fall_ns;
            pulses.resize(pos + 1);
            pulses.back().fall_ns = last_fall;
        }
    }

    out.events.reserve(pulses.size() * 2);
    for (const auto &p : pulses) {
        out.events.push_back({p.rise_ns - capture_origin, Direction::Rising});
        out.events.push_back({p.fall_ns - capture_origin, Direction::Falling});
    }
    return out;
}

std::vector<EdgeEvent> inject_glitches(std::vector<EdgeEvent> events, std::span<const GlitchSpec> glitches,
                                       std::uint64_t seed, Nanos quantum_ns)
{
    std::size_t total = 0;
    for (const auto &g : glitches) {
        total += g.count;
    }
    if (total == 0) {
        return events;
    }
    if (quantum_ns <= 0) {
        throw ConfigError("glitch injection needs a positive sample period");
    }
    if (events.size() < 2 || events.size() % 2 != 0 || !is_alternating(events) ||
        events.front().direction != Direction::Rising) {
        throw ConfigError("glitch injection needs a clean alternating capture starting with a rise");
    }
    const std::size_t pulses = events.size() / 2;
    Nanos smallest_dwell = events[1].timestamp - events[0].timestamp;
    for (std::size_t i = 1; i < events.size(); ++i) {
        smallest_dwell = std::min(smallest_dwell, events[i].timestamp - events[i - 1].timestamp);
    }

    Rng rng(seed, kGlitchStream);
    std::set<std::size_t> used;
    std::vector<EdgeEvent> added;
    for (const auto &g : glitches) {
        if (g.count == 0) {
            continue;
        }
        if (g.dwell_ns <= 0 || g.dwell_ns >= smallest_dwell) {
            throw ConfigError(fmt::format("glitch dwell {} ns must be positive and below the smallest real dwell {} ns",
                                          g.dwell_ns, smallest_dwell));
        }
        const std::size_t candidates = g.placement == GlitchPlacement::LowPeriodPulse ? pulses - 1 : pulses;
        for (std::size_t k = 0; k < g.count; ++k) {
            if (used.size() >= candidates) {
                throw ConfigError("more glitches than pulses to host them");
            }
            std::size_t p = rng.index(candidates);
            while (used.count(p) != 0) {
                p = (p + 1) % candidates;
            }
            used.insert(p);
            const Nanos rise = events[2 * p].timestamp;
            const Nanos fall = events[2 * p + 1].timestamp;
            if (g.placement == GlitchPlacement::LowPeriodPulse) {
                const Nanos next_rise = events[2 * p + 2].timestamp;
                const Nanos low = next_rise - fall;
                const Nanos lo = fall + low / 4;
                const Nanos hi = next_rise - low / 4 - g.dwell_ns;
                if (hi <= lo) {
                    throw ConfigError("low period too short for the glitch pulse");
                }
                const Nanos at = floor_to(lo + static_cast<Nanos>(rng.uniform01() * static_cast<double>(hi - lo)),
                                          quantum_ns);
                if (at - fall <= g.dwell_ns || next_rise - (at + g.dwell_ns) <= g.dwell_ns) {
                    throw ConfigError("glitch pulse would overlap real edges");
                }
                added.push_back({at, Direction::Rising});
                added.push_back({at + g.dwell_ns, Direction::Falling});
            } else {
                const Nanos at = rise + g.dwell_ns;
                if (fall - at <= g.dwell_ns) {
                    throw ConfigError("high period too short for the duplicate edge");
                }
                added.push_back({at, Direction::Rising});
            }
        }
    }
    events.insert(events.end(), added.begin(), added.end());
    std::sort(events.begin(), events.end(),
              [](const EdgeEvent &a, const EdgeEvent &b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp == events[i - 1].timestamp) {
            throw ConfigError("glitch collides with an existing edge");
        }
    }
    return events;
}

std::vector<ProfileSample> generate_profile(const SynthConfig &config)
{
    config.validate();
    Rng rng(config.seed, kProfileStream);
    std::vector<ProfileSample> samples;
    samples.reserve(config.profile.iterations);
    for (std::size_t i = 0; i < config.profile.iterations; ++i) {
        const Nanos high = draw_ns(config.profile.high, 1.0, 0.0, 1, rng);
        const Nanos low = draw_ns(config.profile.low, 1.0, 0.0, 1, rng);
        samples.push_back({i, high, low});
    }
    return samples;
}

SynthScenario scenario_from_json(const nlohmann::json &doc)
{
    SynthScenario s;
    try {
        s.name = doc.at("name").get<std::string>();
        s.description = doc.value("description", std::string());
        s.platform = doc.value("platform", std::string("other"));
        s.state_label = doc.value("state_label", std::string("calibrated-C0"));
        s.config = config_from_json(doc.value("config", nlohmann::json::object()));
        s.expected = doc.value("expected", nlohmann::json::object());
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(fmt::format("invalid scenario: {}", e.what()));
    }
    s.config.validate();
    return s;
}

nlohmann::json scenario_to_json(const SynthScenario &s)
{
    return {{"name", s.name},
            {"description", s.description},
            {"platform", s.platform},
            {"state_label", s.state_label},
            {"config", config_to_json(s.config)},
            {"expected", s.expected}};
}

SynthScenario load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open scenario '{}'", path.string()));
    }
    try {
        return scenario_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(fmt::format("scenario '{}': {}", path.string(), e.what()));
    }
}

SynthDataset build_dataset(const SynthScenario &scenario)
{
    const auto &c = scenario.config;
    c.validate();
    SynthDataset ds;
    std::vector<EdgeEvent> events;
    Nanos min_gap = std::numeric_limits<Nanos>::max();
    Nanos prev_last_fall = -1;
    for (std::size_t t = 0; t < c.trials; ++t) {
        auto trial = generate_trial(c, t);
        if (prev_last_fall >= 0) {
            min_gap = std::min(min_gap, trial.events.front().timestamp - prev_last_fall);
        }
        prev_last_fall = trial.events.back().timestamp;
        ds.records.insert(ds.records.end(), trial.records.begin(), trial.records.end());
        events.insert(events.end(), trial.events.begin(), trial.events.end());
    }
    const auto q = c.sample_quantum_ns();
    ds.capture.events = inject_glitches(std::move(events), c.glitches, c.seed, q);
    ds.capture.sample_rate_hz = c.sample_rate_hz;
    ds.capture.source_id = scenario.name;
    ds.capture.alternating = is_alternating(ds.capture.events);
    ds.profile = generate_profile(c);

    const auto expected_pairs = c.trials * c.inferences_per_trial;
    nlohmann::json derived = {
        {"trials", c.trials},
        {"records", ds.records.size()},
        {"expected_pulse_pairs", expected_pairs},
        {"effective_inferences", c.trials * (c.inferences_per_trial - std::min<std::size_t>(1, c.inferences_per_trial))},
        {"edges", ds.capture.events.size()},
        {"sample_quantum_ns", q},
        {"min_inter_trial_gap_ns", c.trials > 1 ? nlohmann::json(min_gap) : nlohmann::json(nullptr)},
        {"sweep", analytic_sweep(c)},
        // -(alpha*H + (1-beta)*L) at the distribution medians; exact for constant or
        // symmetric call-duration distributions without jitter.
        {"nominal_c_p_ns",
         -(c.rise_fraction * c.high_call.median_ns + (1.0 - c.fall_fraction) * c.low_call.median_ns)},
        {"profile_iterations", c.profile.iterations},
        {"profile_warmup", c.profile.warmup},
    };
    ds.manifest = {
        {"scenario", scenario.name},
        {"platform", scenario.platform},
        {"state_label", scenario.state_label},
        {"files",
         {{"capture", kCaptureFile}, {"orchestrator_log", kOrchestratorFile}, {"profile_log", kProfileFile}}},
        {"expected", scenario.expected},
        {"derived", derived},
        {"config", config_to_json(c)},
    };
    return ds;
}

DatasetFiles dataset_files(const std::filesystem::path &dir)
{
    return {dir / kCaptureFile, dir / kOrchestratorFile, dir / kProfileFile, dir / kManifestFile};
}

DatasetFiles generate_dataset(const SynthScenario &scenario, const std::filesystem::path &dir)
{
    const auto ds = build_dataset(scenario);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    const auto files = dataset_files(dir);
    auto open = [](const std::filesystem::path &p) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(fmt::format("cannot write '{}'", p.string()));
        }
        return out;
    };
    {
        auto out = open(files.capture);
        write_edge_capture(out, ds.capture);
    }
    {
        auto out = open(files.orchestrator_log);
        write_orchestrator_log(out, ds.records);
    }
    {
        auto out = open(files.profile_log);
        write_profile_log(out, ds.profile);
    }
    auto manifest = ds.manifest;
    manifest["sha256"] = {{"capture", file_sha256(files.capture)},
                          {"orchestrator_log", file_sha256(files.orchestrator_log)},
                          {"profile_log", file_sha256(files.profile_log)}};
    {
        auto out = open(files.manifest);
        out << manifest.dump(2) << '\n';
    }
    return files;
}

}  // namespace pulsecal
