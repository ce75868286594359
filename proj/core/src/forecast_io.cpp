#include "scenario_forge/forecast_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <string>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {
namespace {

constexpr const char* kHeader = "issue_time,product,step,level,value";

struct Cells {
    // step -> level -> value
    std::map<std::size_t, std::map<double, double>> values;
};

}  // namespace

std::vector<QuantileForecast> load_forecast_file(const std::filesystem::path& path,
                                                 std::optional<std::size_t> expected_horizon) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_forecast_csv(in, expected_horizon);
}

std::vector<QuantileForecast> parse_forecast_csv(std::istream& in, std::optional<std::size_t> expected_horizon) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaViolation, "empty forecast file");
    if (text::trim(line) != kHeader) {
        throw Error(ErrorCode::SchemaViolation, "header must be '" + std::string(kHeader) + "'");
    }

    std::map<std::pair<Timestamp, std::string>, Cells> grouped;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto where = "line " + std::to_string(line_no);
        const auto f = text::split_fields(line);
        if (f.size() != 5) throw Error(ErrorCode::SchemaViolation, where + ": expected 5 fields");
        Timestamp issue;
        try {
            issue = Timestamp::parse(f[0]);
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaViolation, where + ": " + e.detail());
        }
        if (f[1].empty()) throw Error(ErrorCode::SchemaViolation, where + ": empty product");
        std::size_t step = 0;
        auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), step);
        if (ec != std::errc{} || ptr != f[2].data() + f[2].size()) {
            throw Error(ErrorCode::SchemaViolation, where + ": bad step '" + std::string(f[2]) + "'");
        }
        double level = 0.0;
        double value = 0.0;
        if (!text::parse_finite(f[3], level) || !(level > 0.0 && level < 1.0)) {
            throw Error(ErrorCode::SchemaViolation, where + ": bad level '" + std::string(f[3]) + "'");
        }
        if (!text::parse_finite(f[4], value)) {
            throw Error(ErrorCode::SchemaViolation, where + ": bad value '" + std::string(f[4]) + "'");
        }
        auto& cell = grouped[{issue, std::string(f[1])}].values[step];
        if (!cell.emplace(level, value).second) {
            throw Error(ErrorCode::SchemaViolation, where + ": duplicate (step, level)");
        }
    }
    if (grouped.empty()) throw Error(ErrorCode::SchemaViolation, "forecast file has no rows");

    std::vector<QuantileForecast> out;
    for (auto& [key, cells] : grouped) {
        const auto& [issue, product] = key;
        const auto label = product + "@" + issue.to_string();
        const std::size_t steps = cells.values.size();
        if (cells.values.rbegin()->first != steps - 1) {
            throw Error(ErrorCode::SchemaViolation, label + ": steps must run 0..H-1 without gaps");
        }
        if (expected_horizon && steps != *expected_horizon) {
            throw Error(ErrorCode::HorizonMismatch, label + ": horizon " + std::to_string(steps) +
                                                        ", engine expects " + std::to_string(*expected_horizon));
        }
        std::vector<double> levels;
        for (const auto& [lvl, _] : cells.values.begin()->second) levels.push_back(lvl);
        std::vector<std::vector<double>> rows;
        rows.reserve(steps);
        for (const auto& [step, by_level] : cells.values) {
            std::vector<double> row;
            std::vector<double> row_levels;
            for (const auto& [lvl, v] : by_level) {
                row_levels.push_back(lvl);
                row.push_back(v);
            }
            if (row_levels != levels) {
                throw Error(ErrorCode::SchemaViolation,
                            label + ": step " + std::to_string(step) + " has a different level set");
            }
            rows.push_back(std::move(row));
        }
        try {
            out.push_back({issue, Product(product), QuantileTrajectory(levels, std::move(rows))});
        } catch (const Error& e) {
            if (e.code() == ErrorCode::QuantileCrossing) {
                throw Error(ErrorCode::QuantileCrossing, label + ": " + e.detail());
            }
            throw Error(ErrorCode::SchemaViolation, label + ": " + e.detail());
        }
    }
    return out;
}

void write_forecast_csv(std::ostream& out, std::span<const QuantileForecast> forecasts) {
    out << kHeader << '\n';
    for (const auto& f : forecasts) {
        const auto issue = f.issue_time.to_string();
        const auto& levels = f.trajectory.levels();
        for (std::size_t j = 0; j < f.trajectory.steps(); ++j) {
            const auto row = f.trajectory.row(j);
            for (std::size_t q = 0; q < levels.size(); ++q) {
                out << issue << ',' << f.product.id() << ',' << j << ',' << text::format_double(levels[q]) << ','
                    << text::format_double(row[q]) << '\n';
            }
        }
    }
}

double empirical_quantile(std::span<const double> values, double level) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw Error(ErrorCode::InvalidArgument, "level outside [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuantileForecast baseline_analog_forecast(std::span<const CandidateScenario> members, const Product& product,
                                          std::span<const double> levels, std::optional<Timestamp> issue_time) {
    if (members.size() < 2) {
        throw Error(ErrorCode::InsufficientMembers,
                    "analog forecast needs >= 2 members, got " + std::to_string(members.size()));
    }
    const std::size_t horizon = members.front().horizon();
    Timestamp latest = members.front().anchor();
    for (const auto& m : members) {
        if (m.horizon() != horizon) throw Error(ErrorCode::HorizonMismatch, "analog members differ in horizon");
        latest = std::max(latest, m.anchor());
    }
    std::vector<std::vector<double>> rows(horizon);
    std::vector<double> sample(members.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t k = 0; k < members.size(); ++k) sample[k] = members[k].trajectory(product)[t];
        auto& row = rows[t];
        for (double level : levels) row.push_back(empirical_quantile(sample, level));
        // Guard monotonicity against interpolation rounding.
        for (std::size_t q = 1; q < row.size(); ++q) row[q] = std::max(row[q], row[q - 1]);
    }
    return {issue_time.value_or(latest), product,
            QuantileTrajectory(std::vector<double>(levels.begin(), levels.end()), std::move(rows))};
}

}  // namespace sforge
