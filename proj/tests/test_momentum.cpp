#include <gtest/gtest.h>

#include <cmath>

#include "tennis/error.hpp"
#include "tennis/momentum.hpp"

using namespace tennis;

namespace {

MomentumSeries series(std::vector<double> v)
{
    MomentumSeries s;
    s.values = std::move(v);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.point_no.push_back(static_cast<int>(i + 1));
    return s;
}

} // namespace

TEST(Momentum, TwoPointExample)
{
    const std::vector<double> y = {0.0, 1.0};
    const auto m = ema(y);
    EXPECT_DOUBLE_EQ(m.values[0], 0.0);
    EXPECT_NEAR(m.values[1], 1.0 / 1.1, 1e-12);
}

TEST(Momentum, AlphaOneIsIdentity)
{
    const std::vector<double> y = {0.3, -1.0, 2.5, 7.0};
    const auto m = ema(y, 1.0, 10);
    for (std::size_t t = 0; t < y.size(); ++t) EXPECT_DOUBLE_EQ(m.values[t], y[t]);
}

TEST(Momentum, ConstantSeriesIsFixed)
{
    const std::vector<double> y(25, 0.42);
    for (double v : ema(y).values) EXPECT_NEAR(v, 0.42, 1e-15);
}

TEST(Momentum, WindowTruncatesOldSamples)
{
    // A spike older than the period must have no influence.
    std::vector<double> y(15, 0.0);
    y[0] = 100.0;
    const auto m = ema(y, 0.5, 4);
    EXPECT_GT(m.values[3], 0.0);
    EXPECT_EQ(m.values[4], 0.0);
    // Direct sum at t = 3 with weights 1, .5, .25, .125.
    EXPECT_NEAR(m.values[3], 100.0 * 0.125 / 1.875, 1e-12);
}

TEST(Momentum, EmptySeriesIsRejected)
{
    try {
        ema(std::vector<double>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptySeries);
    }
}

TEST(Momentum, SwingLabelsTrackLeaderChanges)
{
    const auto p1 = series({0.5, 0.6, 0.4, 0.40005, 0.3, 0.7});
    const auto p2 = series({0.4, 0.5, 0.5, 0.4, 0.5, 0.2});
    const auto s = label_swings(p1, p2);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s[0].leader, Leader::P1);
    EXPECT_FALSE(s[0].swing);
    EXPECT_FALSE(s[1].swing);
    EXPECT_EQ(s[2].leader, Leader::P2);
    EXPECT_TRUE(s[2].swing);
    EXPECT_EQ(s[3].leader, Leader::Tied);
    EXPECT_FALSE(s[3].swing);
    EXPECT_EQ(s[4].leader, Leader::P2);
    EXPECT_FALSE(s[4].swing);  // same leader as before the tie
    EXPECT_TRUE(s[5].swing);
    EXPECT_EQ(s[5].point_no, 6);
}

TEST(Momentum, SwingLengthMismatchIsRejected)
{
    try {
        label_swings(series({1, 2}), series({1}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LengthMismatch);
    }
}
