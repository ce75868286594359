#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "scenario_forge/error.hpp"
#include "scenario_forge/forecast_io.hpp"
#include "support/test_support.hpp"

namespace sforge {
namespace {

using testing::t0;

std::string forecast_csv(std::size_t horizon, const std::vector<std::string>& products, int crossing_step = -1) {
    std::ostringstream out;
    out << "issue_time,product,step,level,value\n";
    const auto& levels = default_quantile_levels();
    for (const auto& p : products) {
        for (std::size_t s = 0; s < horizon; ++s) {
            for (std::size_t q = 0; q < levels.size(); ++q) {
                double v = 20.0 + static_cast<double>(s) + 2.0 * static_cast<double>(q);
                if (static_cast<int>(s) == crossing_step && q == 0) v = 1000.0;
                out << "2023-07-03T09:00:00Z," << p << ',' << s << ',' << levels[q] << ',' << v << '\n';
            }
        }
    }
    return out.str();
}

ErrorCode code_of(const std::string& csv, std::optional<std::size_t> h = std::nullopt) {
    std::istringstream in(csv);
    try {
        parse_forecast_csv(in, h);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidArgument;
}

TEST(ForecastFile, TwoProductsSixteenStepsFiveLevels) {
    std::istringstream in(forecast_csv(16, {"ENERGY_RT", "ENERGY_DA"}));
    const auto f = parse_forecast_csv(in, 16);
    ASSERT_EQ(f.size(), 2u);
    for (const auto& q : f) {
        EXPECT_EQ(q.horizon(), 16u);
        EXPECT_EQ(q.trajectory.levels(), default_quantile_levels());
    }
}

TEST(ForecastFile, CrossingNamesStep) {
    std::istringstream in(forecast_csv(16, {"ENERGY_RT"}, 3));
    try {
        parse_forecast_csv(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QuantileCrossing);
        EXPECT_NE(e.detail().find("step=3"), std::string::npos) << e.detail();
    }
}

TEST(ForecastFile, HorizonMismatch) {
    EXPECT_EQ(code_of(forecast_csv(12, {"ENERGY_RT"}), 16), ErrorCode::HorizonMismatch);
}

TEST(ForecastFile, SchemaViolations) {
    EXPECT_EQ(code_of("issue,product,step,level,value\n"), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n"), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n2023-07-03T09:00:00Z,A,0,0.5\n"),
              ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n2023-07-03T09:00:00Z,A,1,0.5,3\n"),
              ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n"
                      "2023-07-03T09:00:00Z,A,0,0.5,3\n2023-07-03T09:00:00Z,A,0,0.5,4\n"),
              ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n"
                      "2023-07-03T09:00:00Z,A,0,0.5,3\n2023-07-03T09:00:00Z,A,1,0.4,4\n"),
              ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of("issue_time,product,step,level,value\n2023-07-03T09:00:00Z,A,0,1.5,3\n"),
              ErrorCode::SchemaViolation);
}

TEST(ForecastFile, EmitThenLoadIsExact) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-100, 100);
    std::vector<QuantileForecast> fs;
    for (const char* p : {"ENERGY_RT", "ENERGY_DA"}) {
        std::vector<std::vector<double>> rows;
        for (int s = 0; s < 16; ++s) {
            std::vector<double> r(5);
            for (auto& v : r) v = std::round(u(rng) * 1000.0) / 1000.0;
            std::sort(r.begin(), r.end());
            rows.push_back(r);
        }
        fs.push_back({t0() + 9, Product(p), QuantileTrajectory(default_quantile_levels(), rows)});
    }
    std::ostringstream out;
    write_forecast_csv(out, fs);
    std::istringstream in(out.str());
    auto back = parse_forecast_csv(in);
    std::sort(back.begin(), back.end(), [](const auto& a, const auto& b) { return b.product < a.product; });
    EXPECT_EQ(back, fs);
}

TEST(EmpiricalQuantile, LinearBetweenOrderStatistics) {
    const std::vector<double> v{5, 1, 4, 2, 3};
    // Frozen from the oracle script (type-7 rule).
    EXPECT_DOUBLE_EQ(empirical_quantile(v, 0.9), 4.6);
    EXPECT_EQ(empirical_quantile(v, 0.5), 3.0);
    EXPECT_EQ(empirical_quantile(v, 0.0), 1.0);
    EXPECT_EQ(empirical_quantile(v, 1.0), 5.0);
}

CandidateScenario member(Timestamp a, std::vector<double> v) {
    return CandidateScenario(a, {{Product("ENERGY_RT"), std::move(v)}});
}

TEST(Baseline, TwoPointMedian) {
    const std::vector<CandidateScenario> m{member(t0(), {0, 0}), member(t0() + 1, {10, 10})};
    const auto f = baseline_analog_forecast(m, Product("ENERGY_RT"), std::vector<double>{0.5});
    EXPECT_EQ(f.trajectory.at_level(0.5), (std::vector<double>{5, 5}));
}

TEST(Baseline, IdenticalMembersCollapse) {
    const std::vector<CandidateScenario> m{member(t0(), {1, 2, 3}), member(t0() + 1, {1, 2, 3}),
                                           member(t0() + 2, {1, 2, 3})};
    const auto f = baseline_analog_forecast(m, Product("ENERGY_RT"), default_quantile_levels());
    for (double level : default_quantile_levels()) EXPECT_EQ(f.trajectory.at_level(level), (std::vector<double>{1, 2, 3}));
}

TEST(Baseline, FiveMembersNinetiethPercentile) {
    std::vector<CandidateScenario> m;
    for (int i = 1; i <= 5; ++i) m.push_back(member(t0() + i, {static_cast<double>(i)}));
    const auto f = baseline_analog_forecast(m, Product("ENERGY_RT"), std::vector<double>{0.5, 0.9});
    EXPECT_DOUBLE_EQ(f.trajectory.at_level(0.9)[0], 4.6);
}

TEST(Baseline, NeedsTwoMembers) {
    const std::vector<CandidateScenario> m{member(t0(), {1})};
    try {
        baseline_analog_forecast(m, Product("ENERGY_RT"), default_quantile_levels());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientMembers);
    }
}

TEST(Baseline, MonotoneAndMedianInsideMemberRange) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(40, 15);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CandidateScenario> m;
        const int count = 2 + static_cast<int>(rng() % 12);
        for (int i = 0; i < count; ++i) {
            std::vector<double> v(16);
            for (auto& e : v) e = n(rng);
            m.push_back(member(t0() + i, v));
        }
        const auto f = baseline_analog_forecast(m, Product("ENERGY_RT"), default_quantile_levels());
        for (std::size_t s = 0; s < 16; ++s) {
            const auto row = f.trajectory.row(s);
            EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
            double lo = 1e300, hi = -1e300;
            for (const auto& c : m) {
                lo = std::min(lo, c.trajectory(Product("ENERGY_RT"))[s]);
                hi = std::max(hi, c.trajectory(Product("ENERGY_RT"))[s]);
            }
            const double med = f.trajectory.at_level(0.5)[s];
            EXPECT_GE(med, lo);
            EXPECT_LE(med, hi);
        }
    }
}

}  // namespace
}  // namespace sforge
