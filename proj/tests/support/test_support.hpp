#pragma once

// Shared generators and reference computations for the unit and acceptance
// suites. The references here are written from the definitions, not from
// the library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "scenario_forge/data_model.hpp"
#include "scenario_forge/dispatch.hpp"
#include "scenario_forge/wcdtw.hpp"

namespace sforge::testing {

inline HourlySeries make_series(const char* product, Timestamp start, std::vector<double> values) {
    return HourlySeries(Product(product), start, std::move(values));
}

inline Timestamp t0() { return Timestamp::from_civil(2023, 7, 3, 0); }  // a Monday

/// Random banded-DTW instance with a monotone quantile matrix.
struct DtwInstance {
    std::vector<double> x;
    QuantileTrajectory y;
    WcdtwConfig cfg;
};

inline DtwInstance random_dtw_instance(std::mt19937_64& rng, std::size_t max_len = 7) {
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_real_distribution<double> value(-50.0, 50.0);
    std::uniform_real_distribution<double> spread(0.0, 10.0);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    static const std::vector<std::vector<double>> level_sets{
        {0.5}, {0.1, 0.5, 0.9}, {0.1, 0.25, 0.5, 0.75, 0.9}};
    static const std::size_t windows[] = {0, 1, 2, WcdtwConfig::kUnbounded};

    const auto& levels = level_sets[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
    const std::size_t window = windows[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
    const std::size_t n = len(rng);
    const std::size_t m = len(rng);

    std::vector<double> x(n);
    for (auto& v : x) v = value(rng);
    std::vector<std::vector<double>> rows(m);
    for (auto& row : rows) {
        double v = value(rng);
        for (std::size_t q = 0; q < levels.size(); ++q) {
            row.push_back(v);
            v += spread(rng);
        }
    }
    std::vector<double> weights(levels.size());
    for (auto& w : weights) w = weight(rng);
    return {std::move(x), QuantileTrajectory(levels, std::move(rows)), WcdtwConfig(window, levels, weights)};
}

/// Exhaustive two-stage dispatch value written straight from the problem
/// statement: every feasible move sequence per scenario, hour value
/// price * action - throughput * |action| with action from the efficiencies,
/// the first move shared. Sums run from the last hour backwards so the
/// result is comparable bit for bit with a backward recursion.
struct DispatchOracleResult {
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> best_moves;  // every first move reaching best_value
};

inline DispatchOracleResult dispatch_oracle(const std::vector<std::vector<double>>& prices,
                                            const std::vector<double>& probabilities, const BatteryParams& b,
                                            double step) {
    const int lmin = static_cast<int>(std::lround(b.soc_min / step));
    const int lmax = static_cast<int>(std::lround(b.soc_max / step));
    const int l0 = static_cast<int>(std::lround(b.initial_soc / step));
    const auto action = [&](int d) {
        if (d > 0) return -static_cast<double>(d) * step / b.charge_efficiency;
        if (d < 0) return static_cast<double>(-d) * step * b.discharge_efficiency;
        return 0.0;
    };
    const auto allowed = [&](int d) {
        const double a = action(d);
        return a < 0 ? -a <= b.max_charge + 1e-9 : a <= b.max_discharge + 1e-9;
    };
    const int span = lmax - lmin;
    std::vector<int> moves;
    for (int d = -span; d <= span; ++d) {
        if (allowed(d)) moves.push_back(d);
    }

    // Best value of hours t..H-1 of one scenario from `level`, by enumeration.
    std::function<double(const std::vector<double>&, std::size_t, int)> tail =
        [&](const std::vector<double>& p, std::size_t t, int level) -> double {
        if (t == p.size()) return 0.0;
        double best = -std::numeric_limits<double>::infinity();
        for (int d : moves) {
            const int next = level + d;
            if (next < lmin || next > lmax) continue;
            const double a = action(d);
            const double hv = p[t] * a - b.throughput_cost * std::abs(a);
            best = std::max(best, hv + tail(p, t + 1, next));
        }
        return best;
    };

    DispatchOracleResult result;
    for (int d : moves) {
        const int next = l0 + d;
        if (next < lmin || next > lmax) continue;
        const double a = action(d);
        double ev = 0.0;
        for (std::size_t k = 0; k < prices.size(); ++k) {
            const double hv = prices[k][0] * a - b.throughput_cost * std::abs(a);
            ev += probabilities[k] * (hv + tail(prices[k], 1, next));
        }
        if (ev > result.best_value) {
            result.best_value = ev;
            result.best_moves = {d};
        } else if (ev == result.best_value) {
            result.best_moves.push_back(d);
        }
    }
    return result;
}

/// Random small dispatch instance: H <= 4, at most 5 SoC levels, at most 5
/// moves per hour, at most 3 scenarios.
struct DispatchInstance {
    std::vector<std::vector<double>> prices;
    std::vector<double> probabilities;
    BatteryParams battery;
    double step = 1.0;
};

inline DispatchInstance random_dispatch_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> horizon(1, 4);
    std::uniform_int_distribution<int> scenarios(1, 3);
    std::uniform_int_distribution<int> levels(2, 5);
    std::uniform_int_distribution<int> power_levels(1, 2);
    std::uniform_real_distribution<double> price(-20.0, 120.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    static const double efficiencies[] = {1.0, 0.95, 0.9, 0.8};
    static const double steps[] = {1.0, 0.5, 0.25};

    DispatchInstance inst;
    inst.step = steps[std::uniform_int_distribution<int>(0, 2)(rng)];
    const int n_levels = levels(rng);
    auto& b = inst.battery;
    b.charge_efficiency = efficiencies[std::uniform_int_distribution<int>(0, 3)(rng)];
    b.discharge_efficiency = efficiencies[std::uniform_int_distribution<int>(0, 3)(rng)];
    b.energy_capacity = inst.step * (n_levels - 1);
    b.soc_min = 0.0;
    b.soc_max = b.energy_capacity;
    b.initial_soc = inst.step * std::uniform_int_distribution<int>(0, n_levels - 1)(rng);
    // Grid-side limits that admit exactly 1 or 2 levels per hour each way.
    b.max_charge = inst.step * power_levels(rng) / b.charge_efficiency;
    b.max_discharge = inst.step * power_levels(rng) * b.discharge_efficiency;
    b.throughput_cost = unit(rng) < 0.5 ? 0.0 : 5.0 * unit(rng);

    const int h = horizon(rng);
    const int k = scenarios(rng);
    double total = 0.0;
    for (int s = 0; s < k; ++s) {
        std::vector<double> p(static_cast<std::size_t>(h));
        for (auto& v : p) v = std::round(price(rng) * 100.0) / 100.0;
        inst.prices.push_back(std::move(p));
        inst.probabilities.push_back(0.1 + unit(rng));
        total += inst.probabilities.back();
    }
    for (auto& p : inst.probabilities) p /= total;
    return inst;
}

inline ScenarioSet scenario_set_from_prices(const std::vector<std::vector<double>>& prices,
                                            const std::vector<double>& probabilities,
                                            const Product& product = Product("ENERGY_RT")) {
    std::vector<CandidateScenario> scenarios;
    for (std::size_t k = 0; k < prices.size(); ++k) {
        scenarios.emplace_back(t0() + static_cast<std::int64_t>(k), std::map<Product, std::vector<double>>{
                                                                       {product, prices[k]}});
    }
    return ScenarioSet(std::move(scenarios), probabilities, prices.front().size());
}

/// Two tight point clouds far apart, as feature vectors with a single lag.
struct TwoClouds {
    std::vector<FeatureVector> features;
    std::vector<int> cloud;  // 0 = A, 1 = B
};

inline FeatureVector lag_only_vector(Timestamp anchor, std::vector<double> lags) {
    FeatureVector fv;
    fv.anchor = anchor;
    fv.calendar = {0, 0, 1, false};
    fv.lagged_prices = std::move(lags);
    return fv;
}

inline TwoClouds two_clouds(std::uint64_t seed, std::size_t per_cloud = 30) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    TwoClouds out;
    for (std::size_t i = 0; i < 2 * per_cloud; ++i) {
        const int c = static_cast<int>(i % 2);
        const double cx = c == 0 ? 0.0 : 100.0;
        const double cy = c == 0 ? 0.0 : -100.0;
        // All calendar fields equal: only the lags vary, at 100x the spread.
        out.features.push_back(lag_only_vector(Timestamp(static_cast<std::int64_t>(i)),
                                               {cx + noise(rng), cy + noise(rng)}));
        out.cloud.push_back(c);
    }
    return out;
}

}  // namespace sforge::testing
