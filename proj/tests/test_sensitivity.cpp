// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>

#include "pulsecal/error.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/report.hpp"
#include "pulsecal/sensitivity.hpp"
#include "support.hpp"

using namespace pulsecal;

namespace {

std::vector<ProfileSample> samples(std::initializer_list<std::pair<Nanos, Nanos>> hl)
{
    std::vector<ProfileSample> out;
    std::uint64_t i = 0;
    for (auto [h, l] : hl) {
        out.push_back({i++, h, l});
    }
    return out;
}

}  // namespace

TEST(Sweep, JetsonGlitchedCapture)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    const auto rows = filter_sweep(ds.capture, group_by_trial(ds.records), kDefaultSweepThresholdsNs, 4070);
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows[0].pair_count, 4072u);
    EXPECT_EQ(rows[0].status, Status::Fail);
    EXPECT_FALSE(rows[0].median_delta_ns);
    EXPECT_EQ(rows[1].pair_count, 4071u);
    EXPECT_EQ(rows[1].status, Status::Fail);
    for (std::size_t i = 3; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].pair_count, 4070u) << rows[i].threshold_ns;
        EXPECT_EQ(rows[i].status, Status::Pass) << rows[i].threshold_ns;
        EXPECT_EQ(rows[i].edges_retained, 8140u);
        ASSERT_TRUE(rows[i].median_delta_ns);
        EXPECT_EQ(*rows[i].median_delta_ns, *rows[3].median_delta_ns);
    }
}

TEST(Sweep, ManifestPredictionMatches)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    const auto rows = filter_sweep(ds.capture, group_by_trial(ds.records), kDefaultSweepThresholdsNs, 4070);
    const auto &predicted = ds.manifest.at("derived").at("sweep");
    ASSERT_EQ(predicted.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(predicted[i].at("pair_count").get<std::size_t>(), rows[i].pair_count);
        EXPECT_EQ(predicted[i].at("status").get<std::string>(), to_string(rows[i].status));
    }
}

TEST(Sweep, PiCleanEverywhere)
{
    const auto ds = build_dataset(testsupport::scenario("pi-paper"));
    for (const auto &row : filter_sweep(ds.capture, group_by_trial(ds.records), kDefaultSweepThresholdsNs, 4070)) {
        EXPECT_EQ(row.pair_count, 4070u);
        EXPECT_EQ(row.status, Status::Pass);
    }
}

TEST(Profile, Summary)
{
    const auto s = profile_summary(samples({{10'000, 8'000}, {10'000, 8'000}, {10'000, 8'000}}), 0);
    EXPECT_DOUBLE_EQ(s.med_sum_ns, 18'000.0);
    EXPECT_EQ(s.n, 3u);
}

TEST(Profile, PerIterationSumDiffersFromSumOfMedians)
{
    const auto s = profile_summary(samples({{1, 9}, {5, 5}, {9, 1}}), 0);
    EXPECT_DOUBLE_EQ(s.med_high_ns, 5.0);
    EXPECT_DOUBLE_EQ(s.med_low_ns, 5.0);
    EXPECT_DOUBLE_EQ(s.med_sum_ns, 10.0);
    const auto t = profile_summary(samples({{1, 1}, {5, 9}, {9, 5}}), 0);
    EXPECT_DOUBLE_EQ(t.med_high_ns + t.med_low_ns, 10.0);
    EXPECT_DOUBLE_EQ(t.med_sum_ns, 14.0);
}

TEST(Profile, WarmupAndDegenerate)
{
    auto s = samples({{100, 100}, {1, 1}, {1, 1}});
    EXPECT_DOUBLE_EQ(profile_summary(s, 1).med_sum_ns, 2.0);
    EXPECT_THROW(profile_summary(s, 2), ConfigError);
    EXPECT_THROW(profile_summary(s, 3), ConfigError);
}

TEST(Profile, SynthJetsonMatched)
{
    const auto ds = build_dataset(testsupport::scenario("jetson-paper"));
    ASSERT_EQ(ds.profile.size(), 5000u);
    const auto s = profile_summary(ds.profile);
    EXPECT_EQ(s.n, 4980u);
    EXPECT_DOUBLE_EQ(s.med_high_ns, 9'830.0);
    EXPECT_DOUBLE_EQ(s.med_low_ns, 8'060.0);
    EXPECT_DOUBLE_EQ(s.med_sum_ns, 17'890.0);
}

TEST(Profile, Compare)
{
    ProfileSummary j;
    j.med_sum_ns = 17'890;
    const auto a = profile_compare(j, -20'000);
    EXPECT_NEAR(a.coverage_ratio, 0.8945, 1e-12);
    EXPECT_NEAR(a.residual_ns, -2'110, 1e-9);
    ProfileSummary p;
    p.med_sum_ns = 102'370;
    const auto b = profile_compare(p, -86'130);
    EXPECT_NEAR(b.residual_ns, 16'240, 1e-9);
    EXPECT_NEAR(b.over_prediction_fraction, 0.18855, 1e-4);
    ProfileSummary e;
    e.med_sum_ns = 5'000;
    const auto c = profile_compare(e, -5'000);
    EXPECT_DOUBLE_EQ(c.coverage_ratio, 1.0);
    EXPECT_DOUBLE_EQ(c.residual_ns, 0.0);
    EXPECT_THROW(profile_compare(e, 0.0), ConfigError);
}

TEST(Profile, SynthPiMatched)
{
    // right-skewed calls put the median of the sum above the sum of the medians
    const auto s = profile_summary(build_dataset(testsupport::scenario("pi-paper")).profile);
    EXPECT_EQ(us2(s.med_high_ns), "51.69");
    EXPECT_EQ(us2(s.med_low_ns), "50.67");
    EXPECT_EQ(us2(s.med_sum_ns), "102.37");
}
