// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles/oracles.hpp"
#include "pulsecal/error.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/sensitivity.hpp"
#include "support.hpp"

using namespace pulsecal;

namespace {

SynthConfig deterministic_config()
{
    SynthConfig c;
    c.trials = 2;
    c.inferences_per_trial = 50;
    c.inference = {DistributionKind::Constant, 1'200'000.0, 0.0};
    c.high_call = {DistributionKind::Constant, 10'000.0, 0.0};
    c.low_call = {DistributionKind::Constant, 8'000.0, 0.0};
    c.inter_inference_gap = {DistributionKind::Constant, 250'000.0, 0.0};
    c.rise_fraction = 1.0;
    c.fall_fraction = 0.0;
    return c;
}

std::vector<Nanos> all_deltas(const SynthScenario &sc)
{
    const auto ds = build_dataset(sc);
    const std::vector<EdgeCapture> caps = {ds.capture};
    PipelineOptions opts;
    opts.warmup_exclude = 0;
    opts.filter_ns = 0;
    std::vector<Nanos> out;
    for (const auto &s : run_pipeline(caps, group_by_trial(ds.records), opts).series) {
        out.insert(out.end(), s.deltas_ns.begin(), s.deltas_ns.end());
    }
    return out;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Synth, AnalyticDelta)
{
    SynthScenario sc;
    sc.config = deterministic_config();
    for (auto d : all_deltas(sc)) {
        ASSERT_EQ(d, -18'000);
    }
}

TEST(Synth, ZeroOverheadLimit)
{
    SynthScenario sc;
    sc.config = deterministic_config();
    sc.config.sample_rate_hz = 1'000'000'000;
    sc.config.high_call = {DistributionKind::Constant, 1.0, 0.0};
    sc.config.low_call = {DistributionKind::Constant, 1.0, 0.0};
    for (auto d : all_deltas(sc)) {
        EXPECT_GE(d, -2);
        EXPECT_LE(d, 0);
    }
}

TEST(Synth, EdgesStayInsideTheirCallWindows)
{
    const auto sc = testsupport::scenario("jetson-paper");
    const Nanos origin = sc.config.clock_origin_ns - sc.config.capture_lead_ns;
    for (std::size_t t = 0; t < sc.config.trials; ++t) {
        const auto trial = generate_trial(sc.config, t);
        ASSERT_EQ(trial.events.size(), 2 * trial.records.size());
        for (std::size_t i = 0; i < trial.records.size(); ++i) {
            const auto &r = trial.records[i];
            const Nanos rise = trial.events[2 * i].timestamp + origin;
            const Nanos fall = trial.events[2 * i + 1].timestamp + origin;
            EXPECT_GE(rise, r.t0);
            EXPECT_LE(rise, r.t1);
            EXPECT_GE(fall, r.t2);
            EXPECT_LE(fall, r.t3);
            EXPECT_EQ(r.t1 - r.t0, trial.high_ns[i]);
            EXPECT_EQ(r.t3 - r.t2, trial.low_ns[i]);
        }
    }
}

TEST(Synth, GlitchesReproduceUnfilteredFail)
{
    const auto sc = testsupport::scenario("pi-paper");
    const auto clean = build_dataset(sc).capture;
    const std::vector<GlitchSpec> glitches = {{2, 40, GlitchPlacement::LowPeriodPulse},
                                              {2, 30, GlitchPlacement::SameDirectionEdge}};
    auto cap = clean;
    cap.events = inject_glitches(clean.events, glitches, 99, clean.sample_quantum_ns());
    cap.alternating = is_alternating(cap.events);
    EXPECT_EQ(cap.events.size(), clean.events.size() + 6);
    const auto raw = pair_edges(cap, 4070);
    EXPECT_EQ(raw.pair_count(), 4072u);
    EXPECT_FALSE(raw.passed());
    const auto filtered = pair_edges(glitch_filter(cap, 75), 4070);
    EXPECT_EQ(filtered.pair_count(), 4070u);
    EXPECT_TRUE(filtered.passed());
}

TEST(Synth, NoGlitchesNoChange)
{
    const auto clean = build_dataset(testsupport::scenario("pi-paper")).capture;
    EXPECT_EQ(inject_glitches(clean.events, {}, 1, 10), clean.events);
}

TEST(Synth, SingleGlitchRemovalBoundary)
{
    SynthScenario sc;
    sc.config = deterministic_config();
    const auto clean = build_dataset(sc).capture;
    const std::vector<GlitchSpec> one = {{1, 40, GlitchPlacement::LowPeriodPulse}};
    const auto glitched = inject_glitches(clean.events, one, 5, 10);
    ASSERT_EQ(glitched.size(), clean.events.size() + 2);
    EXPECT_EQ(oracle::glitch_filter(glitched, 41), clean.events);
    EXPECT_EQ(oracle::glitch_filter(glitched, 40), glitched);
    EXPECT_EQ(glitch_filter(testsupport::capture_of(glitched), 41).events, clean.events);
}

TEST(Synth, GlitchesThatCannotFitAreRejected)
{
    SynthScenario sc;
    sc.config = deterministic_config();
    const auto clean = build_dataset(sc).capture;
    const std::vector<GlitchSpec> huge = {{1, 5'000'000, GlitchPlacement::LowPeriodPulse}};
    EXPECT_THROW(inject_glitches(clean.events, huge, 5, 10), ConfigError);
    const std::vector<GlitchSpec> many = {{1000, 20, GlitchPlacement::LowPeriodPulse}};
    EXPECT_THROW(inject_glitches(clean.events, many, 5, 10), ConfigError);
}

TEST(Synth, ProfileConstants)
{
    SynthConfig c;
    c.profile.high = {DistributionKind::Constant, 9'830.0, 0.0};
    c.profile.low = {DistributionKind::Constant, 8'060.0, 0.0};
    const auto s = profile_summary(generate_profile(c));
    EXPECT_DOUBLE_EQ(s.med_sum_ns, 17'890.0);
    c.profile.high = {DistributionKind::Constant, 51'690.0, 0.0};
    c.profile.low = {DistributionKind::Constant, 50'670.0, 0.0};
    // constant calls cannot give 102.37: the per-iteration sum of constants is 102.36
    EXPECT_DOUBLE_EQ(profile_summary(generate_profile(c)).med_sum_ns, 102'360.0);
}

TEST(Synth, ConfigValidation)
{
    auto c = deterministic_config();
    c.rise_fraction = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = deterministic_config();
    c.trials = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = deterministic_config();
    c.high_call.median_ns = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = deterministic_config();
    c.trial_period_ns = 1'000'000;  // shorter than one trial
    EXPECT_THROW(generate_trial(c, 0), ConfigError);
}

TEST(Synth, ScenarioJsonRoundTrip)
{
    for (const auto *name : {"jetson-paper", "pi-paper", "pi-stuck-line", "jetson-stuck-high"}) {
        const auto sc = testsupport::scenario(name);
        const auto again = scenario_from_json(scenario_to_json(sc));
        EXPECT_EQ(scenario_to_json(again), scenario_to_json(sc)) << name;
    }
}

TEST(Synth, ManifestExpectations)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    const auto &d = ds.manifest.at("derived");
    EXPECT_EQ(d.at("trials"), 10);
    EXPECT_EQ(d.at("expected_pulse_pairs"), 4070);
    EXPECT_EQ(d.at("effective_inferences"), 4060);
    EXPECT_GT(d.at("min_inter_trial_gap_ns").get<Nanos>(), kDefaultGapThresholdNs);
    EXPECT_NEAR(ds.manifest.at("expected").at("c_p_us").get<double>(), -20.0, 1e-12);
}

TEST(Synth, RecoversNominalConstant)
{
    // Delta = -(alpha H + (1 - beta) L) on average; medians and quantization add a few quanta
    auto sc = testsupport::scenario("pi-paper");
    sc.config.fraction_jitter = 0.0;
    sc.config.trial_offset_span_ns = 0.0;
    const auto ds = build_dataset(sc);
    const std::vector<EdgeCapture> caps = {ds.capture};
    const auto result = run_pipeline(caps, group_by_trial(ds.records));
    const auto cal = platform_constant(result.stats, OperatingStateTag{PlatformId::parse("pi"), "c0", "s", "t"});
    const double nominal = ds.manifest.at("derived").at("nominal_c_p_ns").get<double>();
    double worst_std = 0;
    for (const auto &s : result.stats) {
        worst_std = std::max(worst_std, *s.sample_std_ns);
    }
    EXPECT_NEAR(cal.c_p_ns, nominal, worst_std / std::sqrt(406.0) + 2 * 10.0);
}

TEST(Synth, ByteIdenticalReruns)
{
    testsupport::TempDir a("synth-a");
    testsupport::TempDir b("synth-b");
    const auto sc = testsupport::scenario("jetson-paper");
    const auto fa = generate_dataset(sc, a.path);
    const auto fb = generate_dataset(sc, b.path);
    EXPECT_EQ(slurp(fa.capture), slurp(fb.capture));
    EXPECT_EQ(slurp(fa.orchestrator_log), slurp(fb.orchestrator_log));
    EXPECT_EQ(slurp(fa.profile_log), slurp(fb.profile_log));
    EXPECT_EQ(slurp(fa.manifest), slurp(fb.manifest));
}

TEST(Synth, FaultsBehaveAsDescribed)
{
    const auto stuck = build_dataset(testsupport::scenario("jetson-stuck-high"));
    const std::vector<EdgeCapture> caps = {stuck.capture};
    EXPECT_THROW(run_pipeline(caps, group_by_trial(stuck.records)), AlignmentError);

    const auto offset = build_dataset(testsupport::scenario("pi-stuck-line"));
    const std::vector<EdgeCapture> oc = {offset.capture};
    const auto r = run_pipeline(oc, group_by_trial(offset.records));
    for (const auto &s : r.stats) {
        EXPECT_NEAR(s.median_ns, -86'130 - 414'000, 15'000);
    }
}
