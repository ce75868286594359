#pragma once

// Quantile-forecast file format. This CSV is the single contract between
// the engine and any forecaster (the built-in analog baseline or an
// external model):
//
//   issue_time,product,step,level,value
//   2023-07-01T09:00:00Z,ENERGY_RT,0,0.1,21.5
//   ...
//
// One row per (issue_time, product, step, level). Steps run 0..H-1, every
// step carries the same set of levels, and values must be non-decreasing in
// level at each step. Levels are decimals in (0, 1). Row order is free.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scenario_forge/data_model.hpp"
#include "scenario_forge/wcdtw.hpp"

namespace sforge {

struct QuantileForecast {
    Timestamp issue_time;
    Product product;
    QuantileTrajectory trajectory;

    std::size_t horizon() const { return trajectory.steps(); }
    bool operator==(const QuantileForecast&) const = default;
};

inline const std::vector<double>& default_quantile_levels() {
    static const std::vector<double> levels{0.1, 0.25, 0.5, 0.75, 0.9};
    return levels;
}

/// Parses and validates a forecast file. When `expected_horizon` is set,
/// every forecast must have exactly that many steps.
/// Errors: SchemaViolation, QuantileCrossing (step and levels), HorizonMismatch, Io.
std::vector<QuantileForecast> load_forecast_file(const std::filesystem::path& path,
                                                 std::optional<std::size_t> expected_horizon = std::nullopt);
std::vector<QuantileForecast> parse_forecast_csv(std::istream& in,
                                                 std::optional<std::size_t> expected_horizon = std::nullopt);

/// Header plus rows ordered by forecast, step, level.
void write_forecast_csv(std::ostream& out, std::span<const QuantileForecast> forecasts);

/// Empirical quantile with linear interpolation between order statistics
/// (h = (n-1)p; value = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h])).
double empirical_quantile(std::span<const double> values, double level);

/// Per-step empirical quantiles of the members' trajectories for `product`.
/// The issue time is the latest member anchor unless given.
/// Errors: InsufficientMembers (< 2), HorizonMismatch, MissingProduct.
QuantileForecast baseline_analog_forecast(std::span<const CandidateScenario> members, const Product& product,
                                          std::span<const double> levels,
                                          std::optional<Timestamp> issue_time = std::nullopt);

}  // namespace sforge
