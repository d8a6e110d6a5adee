// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "pulsecal/error.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/pulse.hpp"
#include "pulsecal/synth.hpp"
#include "support.hpp"

using namespace pulsecal;
using testsupport::capture_of;

namespace {

constexpr auto R = Direction::Rising;
constexpr auto F = Direction::Falling;

std::vector<PulsePair> pulse_train(std::size_t n, Nanos start, Nanos period, Nanos width)
{
    std::vector<PulsePair> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Nanos r = start + static_cast<Nanos>(i) * period;
        out.push_back({r, r + width});
    }
    return out;
}

TrialRecords records_for(const std::string &id, std::size_t n)
{
    TrialRecords t{id, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const Nanos b = static_cast<Nanos>(i) * 2'000'000;
        t.records.push_back({id, i, b, b + 10'000, b + 1'210'000, b + 1'218'000});
    }
    return t;
}

}  // namespace

TEST(GlitchFilter, SuppressesShortLowDwell)
{
    const auto out = glitch_filter(capture_of({{0, R}, {100, F}, {150, R}, {10000, F}}), 75);
    EXPECT_EQ(out.events, (std::vector<EdgeEvent>{{0, R}, {10000, F}}));
    EXPECT_TRUE(out.alternating);
}

TEST(GlitchFilter, ThresholdZeroIsIdentity)
{
    const auto in = capture_of({{0, R}, {3, R}, {4, F}, {9, F}});
    EXPECT_EQ(glitch_filter(in, 0).events, in.events);
}

TEST(GlitchFilter, DuplicateEdgeDropped)
{
    const auto out = glitch_filter(capture_of({{0, R}, {500, R}, {1000, F}}), 1);
    EXPECT_EQ(out.events, (std::vector<EdgeEvent>{{0, R}, {1000, F}}));
}

TEST(GlitchFilter, UnboundedLevelsAreNotDwells)
{
    const auto lone = capture_of({{5, R}});
    EXPECT_EQ(glitch_filter(lone, 1000).events, lone.events);
    // the long idle low before the first rise does not count, the short high does
    const auto in = capture_of({{1'000'000, R}, {1'000'010, F}});
    EXPECT_TRUE(glitch_filter(in, 1000).events.empty());
    EXPECT_EQ(glitch_filter(in, 10).events, in.events);
}

TEST(GlitchFilter, NegativeThresholdRejected)
{
    EXPECT_THROW(glitch_filter(capture_of({}), -1), ConfigError);
}

TEST(GlitchFilter, SixSpuriousEdgesRemoved)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    EXPECT_EQ(ds.capture.events.size(), 8146u);
    const auto out = glitch_filter(ds.capture, 75);
    EXPECT_EQ(out.events.size(), 8140u);
    EXPECT_TRUE(out.alternating);
}

TEST(GlitchFilter, MatchesOracleOnHandCases)
{
    const std::vector<std::vector<EdgeEvent>> cases = {
        {{0, R}, {10, F}, {20, R}, {30, F}, {40, R}},
        {{0, F}, {5, F}, {6, R}, {7, R}, {100, F}},
        {{0, R}, {50, F}, {60, R}, {61, F}, {62, R}, {300, F}},
    };
    for (const auto &c : cases) {
        for (Nanos t : {1, 2, 5, 11, 40, 75, 1000}) {
            EXPECT_EQ(glitch_filter(capture_of(c), t).events, oracle::glitch_filter(c, t)) << "threshold " << t;
        }
    }
}

TEST(Pairing, SingleCleanPulse)
{
    const auto o = pair_edges(capture_of({{0, R}, {1000, F}}));
    ASSERT_EQ(o.pair_count(), 1u);
    EXPECT_EQ(o.pairs[0].width_ns(), 1000);
    EXPECT_TRUE(o.passed());
}

TEST(Pairing, ConsecutiveRiseIsViolation)
{
    const auto o = pair_edges(capture_of({{0, R}, {500, R}, {1000, F}}));
    ASSERT_EQ(o.violations.size(), 1u);
    EXPECT_EQ(o.violations[0].kind, ViolationKind::ConsecutiveSameDirection);
    EXPECT_EQ(o.violations[0].timestamp, 500);
    EXPECT_EQ(o.pairs, (std::vector<PulsePair>{{500, 1000}}));
    EXPECT_FALSE(o.passed());
}

TEST(Pairing, LeadingFallAndTrailingRise)
{
    const auto o = pair_edges(capture_of({{0, F}, {10, R}, {20, F}, {30, R}}));
    ASSERT_EQ(o.violations.size(), 2u);
    EXPECT_EQ(o.violations[0].kind, ViolationKind::LeadingFall);
    EXPECT_EQ(o.violations[1].kind, ViolationKind::TrailingRise);
    EXPECT_EQ(o.pair_count(), 1u);
}

TEST(Pairing, CountMismatchFails)
{
    const auto o = pair_edges(capture_of({{0, R}, {10, F}}), 2);
    EXPECT_TRUE(o.violations.empty());
    EXPECT_FALSE(o.passed());
}

TEST(Pairing, CleanCaptureOf8140Edges)
{
    const auto ds = build_dataset(testsupport::scenario("pi-paper"));
    ASSERT_EQ(ds.capture.events.size(), 8140u);
    const auto o = pair_edges(ds.capture, 4070);
    EXPECT_EQ(o.pair_count(), 4070u);
    EXPECT_TRUE(o.passed());
}

TEST(Segmentation, TenBurstsOf407)
{
    std::vector<PulsePair> all;
    for (int t = 0; t < 10; ++t) {
        const auto burst = pulse_train(407, Nanos{t} * 10'000'000'000, 1'500'000, 1'200'000);
        all.insert(all.end(), burst.begin(), burst.end());
    }
    const auto segs = segment_trials(all, 1'000'000'000);
    ASSERT_EQ(segs.size(), 10u);
    for (const auto &s : segs) {
        EXPECT_EQ(s.size(), 407u);
    }
}

TEST(Segmentation, NoGapAndOneGap)
{
    auto pulses = pulse_train(20, 0, 2'000'000, 1'000'000);
    EXPECT_EQ(segment_trials(pulses, 1'000'000'000).size(), 1u);
    for (std::size_t i = 10; i < pulses.size(); ++i) {
        pulses[i].rise_ns += 5'000'000'000;
        pulses[i].fall_ns += 5'000'000'000;
    }
    const auto segs = segment_trials(pulses, 100'000'000);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].size(), 10u);
    EXPECT_TRUE(segment_trials({}, 1).empty());
}

TEST(Align, WarmupExcluded)
{
    const std::vector<TrialRecords> trials = {records_for("T01", 407)};
    const std::vector<std::vector<PulsePair>> segs = {pulse_train(407, 5'000, 2'000'000, 1'200'000)};
    const auto aligned = align(trials, segs, 1);
    ASSERT_EQ(aligned.size(), 1u);
    EXPECT_EQ(aligned[0].items.size(), 407u);
    EXPECT_EQ(aligned[0].effective().size(), 406u);
    EXPECT_EQ(aligned[0].effective().front().record.index, 1u);
}

TEST(Align, CountMismatchNamesTrial)
{
    const std::vector<TrialRecords> trials = {records_for("T07", 407)};
    const std::vector<std::vector<PulsePair>> segs = {pulse_train(406, 5'000, 2'000'000, 1'200'000)};
    try {
        align(trials, segs, 1);
        FAIL();
    } catch (const AlignmentError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("T07"), std::string::npos);
        EXPECT_NE(msg.find("407"), std::string::npos);
        EXPECT_NE(msg.find("406"), std::string::npos);
    }
}

TEST(Align, SegmentCountMismatch)
{
    const std::vector<TrialRecords> trials = {records_for("A", 3), records_for("B", 3)};
    const std::vector<std::vector<PulsePair>> segs = {pulse_train(3, 0, 2'000'000, 1'000'000)};
    EXPECT_THROW(align(trials, segs, 1), AlignmentError);
}

TEST(Align, FiveTrialDataset)
{
    auto sc = testsupport::scenario("pi-paper");
    sc.config.trials = 5;
    const auto ds = build_dataset(sc);
    const std::vector<EdgeCapture> caps = {ds.capture};
    const auto result = run_pipeline(caps, group_by_trial(ds.records));
    ASSERT_EQ(result.aligned.size(), 5u);
    std::size_t effective = 0;
    for (const auto &t : result.aligned) {
        effective += t.effective().size();
    }
    EXPECT_EQ(effective, 2030u);
}
