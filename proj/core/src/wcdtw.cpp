#include "scenario_forge/wcdtw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw Error(ErrorCode::InvalidArgument, "at least one quantile level required");
    for (std::size_t q = 0; q < levels.size(); ++q) {
        if (!(levels[q] > 0.0 && levels[q] < 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "quantile level " + text::format_double(levels[q]) +
                                                        " outside (0, 1)");
        }
        if (q > 0 && !(levels[q] > levels[q - 1])) {
            throw Error(ErrorCode::InvalidArgument, "quantile levels must be strictly increasing");
        }
    }
}

bool in_band(std::size_t i, std::size_t j, std::size_t window) {
    return (i > j ? i - j : j - i) <= window;
}

}  // namespace

// --- Distance --------------------------------------------------------------

Distance Distance::finite(double value) {
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "distance must be finite and non-negative");
    }
    Distance d;
    d.feasible_ = true;
    d.value_ = value;
    return d;
}

double Distance::value() const {
    if (!feasible_) throw Error(ErrorCode::InvalidArgument, "distance is infeasible");
    return value_;
}

std::partial_ordering Distance::operator<=>(const Distance& other) const {
    if (feasible_ != other.feasible_) {
        return feasible_ ? std::partial_ordering::less : std::partial_ordering::greater;
    }
    if (!feasible_) return std::partial_ordering::equivalent;
    return value_ <=> other.value_;
}

bool Distance::operator==(const Distance& other) const {
    return feasible_ == other.feasible_ && (!feasible_ || value_ == other.value_);
}

// --- Config and forecast matrix ---------------------------------------------

WcdtwConfig::WcdtwConfig(std::size_t window, std::vector<double> levels, std::vector<double> weights)
    : window_(window), levels_(std::move(levels)), weights_(std::move(weights)) {
    check_levels(levels_);
    if (weights_.size() != levels_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one weight per quantile level required");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "negative quantile weight");
        total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "quantile weights sum to zero");
    for (double& w : weights_) w /= total;
}

WcdtwConfig WcdtwConfig::with_window(std::size_t window) const {
    WcdtwConfig copy = *this;
    copy.window_ = window;
    return copy;
}

QuantileTrajectory::QuantileTrajectory(std::vector<double> levels, std::vector<std::vector<double>> rows)
    : levels_(std::move(levels)), rows_(std::move(rows)) {
    check_levels(levels_);
    if (rows_.empty()) throw Error(ErrorCode::InvalidArgument, "forecast has no steps");
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        const auto& r = rows_[j];
        if (r.size() != levels_.size()) {
            throw Error(ErrorCode::DimensionMismatch, "step " + std::to_string(j) + " has " +
                                                          std::to_string(r.size()) + " values for " +
                                                          std::to_string(levels_.size()) + " levels");
        }
        for (std::size_t q = 0; q < r.size(); ++q) {
            if (!std::isfinite(r[q])) {
                throw Error(ErrorCode::InvalidArgument, "non-finite forecast value at step " + std::to_string(j));
            }
            if (q > 0 && r[q] < r[q - 1]) {
                throw Error(ErrorCode::QuantileCrossing,
                            "step=" + std::to_string(j) + " levels=" + text::format_double(levels_[q - 1]) + ">" +
                                text::format_double(levels_[q]));
            }
        }
    }
}

std::vector<double> QuantileTrajectory::at_level(double level) const {
    const auto it = std::find(levels_.begin(), levels_.end(), level);
    if (it == levels_.end()) {
        throw Error(ErrorCode::InvalidArgument, "forecast has no level " + text::format_double(level));
    }
    const auto q = static_cast<std::size_t>(it - levels_.begin());
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[q]);
    return out;
}

// --- Kernel ----------------------------------------------------------------

double local_cost(double x, std::span<const double> row, const WcdtwConfig& cfg) {
    const auto& w = cfg.weights();
    if (row.size() != w.size()) {
        throw Error(ErrorCode::DimensionMismatch, "forecast row has " + std::to_string(row.size()) +
                                                      " values, config has " + std::to_string(w.size()) +
                                                      " levels");
    }
    double cost = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) cost += w[q] * std::abs(x - row[q]);
    return cost;
}

Distance wcdtw_distance(std::span<const double> x, const QuantileTrajectory& y, const WcdtwConfig& cfg) {
    const std::size_t n = x.size();
    const std::size_t m = y.steps();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    if (y.quantile_count() != cfg.quantile_count()) {
        throw Error(ErrorCode::DimensionMismatch, "forecast and config disagree on quantile count");
    }
    const std::size_t w = cfg.window();
    if ((n > m ? n - m : m - n) > w) return Distance::infeasible();

    // prev/cur hold row i-1 and row i over columns 0..m-1 (0-based).
    std::vector<double> prev(m, kInf);
    std::vector<double> cur(m, kInf);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > w ? i - w : 0;
        const std::size_t hi = w >= m - 1 || i + w >= m - 1 ? m - 1 : i + w;
        std::fill(cur.begin(), cur.end(), kInf);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double c = local_cost(x[i], y.row(j), cfg);
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                best = kInf;
                if (i > 0) best = std::min(best, prev[j]);
                if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
                if (j > 0) best = std::min(best, cur[j - 1]);
            }
            cur[j] = best == kInf ? kInf : (i == 0 && j == 0 ? c : c + best);
        }
        std::swap(prev, cur);
    }
    const double result = prev[m - 1];
    return result == kInf ? Distance::infeasible() : Distance::finite(result);
}

namespace {

// Accumulates cost in path order from (0,0), matching the DP's summation.
void enumerate_paths(std::span<const double> x, const QuantileTrajectory& y, const WcdtwConfig& cfg,
                     std::size_t i, std::size_t j, double acc, double& best) {
    const std::size_t n = x.size();
    const std::size_t m = y.steps();
    if (!in_band(i, j, cfg.window())) return;
    const double c = local_cost(x[i], y.row(j), cfg);
    const double total = (i == 0 && j == 0) ? c : c + acc;
    if (i == n - 1 && j == m - 1) {
        best = std::min(best, total);
        return;
    }
    if (i + 1 < n) enumerate_paths(x, y, cfg, i + 1, j, total, best);
    if (i + 1 < n && j + 1 < m) enumerate_paths(x, y, cfg, i + 1, j + 1, total, best);
    if (j + 1 < m) enumerate_paths(x, y, cfg, i, j + 1, total, best);
}

}  // namespace

Distance brute_force_dtw(std::span<const double> x, const QuantileTrajectory& y, const WcdtwConfig& cfg) {
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    if (x.size() + y.steps() > 14) {
        throw Error(ErrorCode::InstanceTooLarge,
                    "n + m = " + std::to_string(x.size() + y.steps()) + " exceeds 14");
    }
    if (y.quantile_count() != cfg.quantile_count()) {
        throw Error(ErrorCode::DimensionMismatch, "forecast and config disagree on quantile count");
    }
    double best = kInf;
    enumerate_paths(x, y, cfg, 0, 0, 0.0, best);
    return best == kInf ? Distance::infeasible() : Distance::finite(best);
}

}  // namespace sforge
