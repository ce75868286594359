#include <gtest/gtest.h>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"
#include "scenario_forge/time.hpp"

namespace sforge {
namespace {

TEST(Timestamp, ParsesUtcAndOffsets) {
    const auto utc = Timestamp::parse("2023-07-03T09:00:00Z");
    EXPECT_EQ(utc, Timestamp::from_civil(2023, 7, 3, 9));
    EXPECT_EQ(Timestamp::parse("2023-07-03T11:00:00+02:00"), utc);
    EXPECT_EQ(Timestamp::parse("2023-07-03T04:00:00-05:00"), utc);
    EXPECT_EQ(Timestamp::parse("2023-07-03 09:00"), utc);
    EXPECT_EQ(utc.to_string(), "2023-07-03T09:00:00Z");
}

TEST(Timestamp, RejectsSubHourAndGarbage) {
    EXPECT_THROW(Timestamp::parse("2023-07-03T09:30:00Z"), Error);
    EXPECT_THROW(Timestamp::parse("2023-13-03T09:00:00Z"), Error);
    EXPECT_THROW(Timestamp::parse("yesterday"), Error);
}

TEST(Timestamp, RoundTripsThroughText) {
    for (std::int64_t h = -48; h < 24 * 800; h += 37) {
        const Timestamp t(h);
        EXPECT_EQ(Timestamp::parse(t.to_string()), t);
    }
}

TEST(Calendar, MondayNineAndSaturdayMidnight) {
    const auto mon = calendar_fields(Timestamp::from_civil(2023, 7, 3, 9));
    EXPECT_EQ(mon.hour_of_day, 9);
    EXPECT_EQ(mon.day_of_week, 0);
    EXPECT_EQ(mon.month, 7);
    EXPECT_FALSE(mon.weekend);
    const auto sat = calendar_fields(Timestamp::from_civil(2023, 7, 8, 0));
    EXPECT_EQ(sat.day_of_week, 5);
    EXPECT_TRUE(sat.weekend);
}

TEST(Text, FormatsShortestRoundTrip) {
    EXPECT_EQ(text::format_double(0.1), "0.1");
    EXPECT_EQ(text::format_double(-0.0), "0");
    EXPECT_EQ(text::format_double(20.0), "20");
    double back = 0.0;
    ASSERT_TRUE(text::parse_finite(text::format_double(1.0 / 3.0), back));
    EXPECT_EQ(back, 1.0 / 3.0);
}

TEST(Text, RejectsNonFinite) {
    double v = 0.0;
    EXPECT_FALSE(text::parse_finite("nan", v));
    EXPECT_FALSE(text::parse_finite("inf", v));
    EXPECT_FALSE(text::parse_finite("", v));
    EXPECT_FALSE(text::parse_finite("1.5x", v));
    EXPECT_TRUE(text::parse_finite(" 2.5 ", v));
    EXPECT_EQ(v, 2.5);
}

TEST(ErrorCodes, UpperSnakeNames) {
    EXPECT_EQ(to_string(ErrorCode::PoolTooSmall), "POOL_TOO_SMALL");
    EXPECT_EQ(to_string(ErrorCode::Config), "CONFIG");
    EXPECT_EQ(to_string(ErrorCode::GapInSeries), "GAP_IN_SERIES");
}

}  // namespace
}  // namespace sforge
