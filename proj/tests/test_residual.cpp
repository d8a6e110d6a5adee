// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "pulsecal/error.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/report.hpp"
#include "pulsecal/residual.hpp"
#include "support.hpp"

using namespace pulsecal;

namespace {

ResidualSeries series(const std::string &id, std::vector<Nanos> d)
{
    return {id, std::move(d), PerfConvention::Outer};
}

OperatingStateTag tag()
{
    OperatingStateTag t;
    t.platform = PlatformId::parse("jetson");
    t.session_id = "s1";
    t.captured_at = "2026-04-26T10:00:00Z";
    return t;
}

AlignedTrial one_item(InferenceRecord r, PulsePair p)
{
    AlignedTrial t;
    t.trial_id = r.trial_id;
    t.items.push_back({r, p});
    t.warmup_excluded = 0;
    return t;
}

}  // namespace

TEST(Residual, WidthEqualToIntervalIsZero)
{
    const auto s = compute_deltas(one_item({"T", 0, 0, 10, 990, 1000}, {0, 1000}));
    EXPECT_EQ(s.deltas_ns, (std::vector<Nanos>{0}));
}

TEST(Residual, CallBoundaryPlacement)
{
    const InferenceRecord r{"T", 0, 0, 10'000, 1'210'000, 1'218'000};
    const PulsePair p{10'000, 1'210'000};
    EXPECT_EQ(compute_deltas(one_item(r, p)).deltas_ns.front(), -18'000);
    EXPECT_EQ(compute_deltas(one_item(r, p), PerfConvention::Inner).deltas_ns.front(), 0);
}

TEST(Residual, ConstantTrialMedian)
{
    const auto st = trial_stats(series("T", std::vector<Nanos>(406, -20'000)));
    EXPECT_DOUBLE_EQ(st.median_ns, -20'000.0);
    ASSERT_TRUE(st.sample_std_ns);
    EXPECT_DOUBLE_EQ(*st.sample_std_ns, 0.0);
}

TEST(Residual, SmallAnalyticCases)
{
    const auto a = trial_stats(series("a", {-1000, -2000, -3000}));
    EXPECT_DOUBLE_EQ(a.median_ns, -2000.0);
    EXPECT_DOUBLE_EQ(*a.sample_std_ns, 1000.0);
    EXPECT_EQ(a.min_ns, -3000);
    EXPECT_EQ(a.max_ns, -1000);
    const auto b = trial_stats(series("b", {-1000, -2000, -3000, -4000}));
    EXPECT_DOUBLE_EQ(b.median_ns, -2500.0);
    const auto c = trial_stats(series("c", {-7}));
    EXPECT_FALSE(c.sample_std_ns.has_value());
    EXPECT_THROW(trial_stats(series("d", {})), ConfigError);
}

TEST(Residual, MedianMatchesOracle)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::uniform_int_distribution<std::size_t> len(1, 40);
        std::uniform_int_distribution<Nanos> val(-5'000'000'000'000, 5'000'000'000'000);
        std::vector<Nanos> v(len(rng));
        for (auto &x : v) {
            x = val(rng);
        }
        EXPECT_EQ(median_ns(v), oracle::median(v));
        if (v.size() > 1) {
            EXPECT_NEAR(*trial_stats(series("x", v)).sample_std_ns, oracle::sample_std(v),
                        1e-9 * oracle::sample_std(v) + 1e-6);
        }
    }
}

TEST(Calibration, SingleTrial)
{
    const std::vector<TrialStats> stats = {trial_stats(series("T", {-5000, -5000, -5000}))};
    EXPECT_DOUBLE_EQ(platform_constant(stats, tag()).c_p_ns, -5000.0);
}

TEST(Calibration, MeanOfMedians)
{
    const std::vector<TrialStats> stats = {trial_stats(series("a", {-1000, -1000})),
                                           trial_stats(series("b", {-2000, -2000})),
                                           trial_stats(series("c", {-3000, -3000}))};
    const auto cal = platform_constant(stats, tag());
    EXPECT_DOUBLE_EQ(cal.c_p_ns, -2000.0);
    EXPECT_EQ(cal.n_trials, 3u);
    EXPECT_EQ(cal.median_range_ns, (std::pair<double, double>{-3000.0, -1000.0}));
    EXPECT_THROW(platform_constant(std::vector<TrialStats>{}, tag()), ConfigError);
}

TEST(Calibration, TenJetsonMedians)
{
    const std::vector<double> medians = {-20.41, -19.83, -20.10, -19.90, -20.02,
                                         -19.95, -20.05, -19.98, -19.87, -19.89};
    std::vector<TrialStats> stats;
    for (std::size_t i = 0; i < medians.size(); ++i) {
        const auto m = static_cast<Nanos>(std::llround(medians[i] * 1000));
        stats.push_back(trial_stats(series("T" + std::to_string(i), {m - 100, m, m + 100})));
    }
    const auto cal = platform_constant(stats, tag());
    EXPECT_NEAR(cal.c_p_ns, oracle::mean({-20410, -19830, -20100, -19900, -20020, -19950, -20050, -19980, -19870,
                                          -19890}),
                1e-9);
    EXPECT_EQ(us2(cal.c_p_ns), "-20.00");
}

TEST(Tolerance, Derivation)
{
    auto with_std = [](double s) {
        TrialStats t;
        t.sample_std_ns = s;
        t.n = 2;
        return t;
    };
    EXPECT_NEAR(derive_tolerance(std::vector{with_std(14'790.0)}, 2.5), 36'975.0, 1e-9);
    EXPECT_DOUBLE_EQ(derive_tolerance(std::vector{with_std(0.0), with_std(0.0)}), 0.0);
    EXPECT_DOUBLE_EQ(derive_tolerance(std::vector{with_std(3000.0), with_std(5000.0)}, 2.0), 10'000.0);
    EXPECT_THROW(derive_tolerance(std::vector<TrialStats>{}), ConfigError);
    EXPECT_THROW(derive_tolerance(std::vector{with_std(1.0)}, 0.0), ConfigError);
}

TEST(Calibration, JetsonScenarioStdBand)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    const std::vector<EdgeCapture> caps = {ds.capture};
    const auto result = run_pipeline(caps, group_by_trial(ds.records));
    for (const auto &st : result.stats) {
        EXPECT_GE(*st.sample_std_ns, 2'460.0) << st.trial_id;
        EXPECT_LE(*st.sample_std_ns, 5'120.0) << st.trial_id;
    }
}
