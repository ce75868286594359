#pragma once

// Weighted constrained dynamic time warping between a realized trajectory
// and a quantile forecast.
//
// For a historical trajectory x (n steps) and a forecast y with Q quantile
// levels (m steps), the local cost of aligning x_i with forecast step j is
//
//     w(i, j) = sum_q w^q * |x_i - y_j^q|          (w^q normalized to sum 1)
//
// and the accumulated cost follows the usual DTW recursion restricted to a
// Sakoe-Chiba band of half-width W (1-based indices):
//
//     D(i, j) = +inf                                        if |i - j| > W
//     D(1, 1) = w(1, 1)
//     D(i, j) = w(i, j) + min(D(i-1, j), D(i-1, j-1), D(i, j-1))
//
// with out-of-range predecessors treated as +inf. The distance is the raw
// D(n, m); no path-length normalization is applied.

#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace sforge {

/// Result of a banded alignment: a finite non-negative cost, or infeasible
/// when no warping path fits inside the band.
class Distance {
public:
    static Distance finite(double value);
    static Distance infeasible() { return Distance(); }

    bool is_feasible() const { return feasible_; }
    /// Throws Error(InvalidArgument) when infeasible.
    double value() const;
    /// The finite value, or +inf.
    double value_or_infinity() const {
        return feasible_ ? value_ : std::numeric_limits<double>::infinity();
    }

    /// Infeasible compares greater than every finite distance.
    std::partial_ordering operator<=>(const Distance& other) const;
    bool operator==(const Distance& other) const;

private:
    Distance() = default;
    bool feasible_ = false;
    double value_ = 0.0;
};

class WcdtwConfig {
public:
    static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

    /// Levels strictly increasing in (0, 1), weights non-negative with a
    /// positive sum; weights are normalized to sum to 1.
    /// Throws Error(InvalidArgument) / Error(DimensionMismatch).
    WcdtwConfig(std::size_t window, std::vector<double> levels, std::vector<double> weights);

    std::size_t window() const { return window_; }
    const std::vector<double>& levels() const { return levels_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t quantile_count() const { return levels_.size(); }

    WcdtwConfig with_window(std::size_t window) const;

private:
    std::size_t window_;
    std::vector<double> levels_;
    std::vector<double> weights_;
};

/// H x Q matrix of forecast values; row j = horizon step, column q = level.
class QuantileTrajectory {
public:
    /// Throws Error(DimensionMismatch) for a ragged matrix,
    /// Error(QuantileCrossing) naming the first step whose row decreases
    /// across levels, Error(InvalidArgument) for bad levels.
    QuantileTrajectory(std::vector<double> levels, std::vector<std::vector<double>> rows);

    const std::vector<double>& levels() const { return levels_; }
    std::size_t steps() const { return rows_.size(); }
    std::size_t quantile_count() const { return levels_.size(); }
    std::span<const double> row(std::size_t step) const { return rows_.at(step); }
    /// Values at one level across all steps; throws if the level is absent.
    std::vector<double> at_level(double level) const;

    bool operator==(const QuantileTrajectory&) const = default;

private:
    std::vector<double> levels_;
    std::vector<std::vector<double>> rows_;
};

/// sum_q w^q |x - row[q]|. Throws Error(DimensionMismatch) when the row
/// length differs from the configured number of levels.
double local_cost(double x, std::span<const double> row, const WcdtwConfig& cfg);

/// Banded DP with a two-row rolling buffer; O(n * min(m, 2W+1)) time.
Distance wcdtw_distance(std::span<const double> x, const QuantileTrajectory& y, const WcdtwConfig& cfg);

/// Exhaustive reference: minimum over every monotone, contiguous warping
/// path inside the band. Throws Error(InstanceTooLarge) when n + m > 14.
Distance brute_force_dtw(std::span<const double> x, const QuantileTrajectory& y, const WcdtwConfig& cfg);

}  // namespace sforge
