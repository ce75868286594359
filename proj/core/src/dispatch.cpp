#include "scenario_forge/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {
namespace {

constexpr double kGridTolerance = 1e-9;

int whole_levels(double value, double step, const char* what) {
    const double ratio = value / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > kGridTolerance * std::max(1.0, std::abs(ratio))) {
        throw Error(ErrorCode::InfeasibleDiscretization, std::string(what) + " = " + text::format_double(value) +
                                                             " is not a multiple of soc_step " +
                                                             text::format_double(step));
    }
    return static_cast<int>(rounded);
}

int floor_levels(double energy, double step) {
    return static_cast<int>(std::floor(energy / step + kGridTolerance));
}

}  // namespace

void BatteryParams::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw Error(ErrorCode::Config, std::string("battery.") + field);
    };
    require(energy_capacity > 0 && std::isfinite(energy_capacity), "energy_capacity");
    require(max_charge > 0 && std::isfinite(max_charge), "max_charge");
    require(max_discharge > 0 && std::isfinite(max_discharge), "max_discharge");
    require(charge_efficiency > 0 && charge_efficiency <= 1, "charge_efficiency");
    require(discharge_efficiency > 0 && discharge_efficiency <= 1, "discharge_efficiency");
    require(soc_min >= 0, "soc_min");
    require(soc_min <= initial_soc, "initial_soc");
    require(initial_soc <= soc_max, "initial_soc");
    require(soc_max <= energy_capacity, "soc_max");
    require(throughput_cost >= 0 && std::isfinite(throughput_cost), "throughput_cost");
}

DispatchGrid DispatchGrid::defaults(const BatteryParams& battery) { return {battery.energy_capacity / 20.0}; }

double DiscreteBattery::action_mw(int delta) const {
    if (delta > 0) return -static_cast<double>(delta) * soc_step / charge_efficiency;
    if (delta < 0) return static_cast<double>(-delta) * soc_step * discharge_efficiency;
    return 0.0;
}

double DiscreteBattery::hour_value(double price, int delta) const {
    const double a = action_mw(delta);
    return price * a - throughput_cost * std::abs(a);
}

DiscreteBattery discretize(const BatteryParams& battery, const DispatchGrid& grid) {
    battery.validate();
    if (!(grid.soc_step > 0.0) || !std::isfinite(grid.soc_step)) {
        throw Error(ErrorCode::InfeasibleDiscretization, "soc_step must be positive");
    }
    DiscreteBattery d;
    d.soc_step = grid.soc_step;
    d.level_min = whole_levels(battery.soc_min, grid.soc_step, "soc_min");
    d.level_max = whole_levels(battery.soc_max, grid.soc_step, "soc_max");
    d.max_up = floor_levels(battery.max_charge * battery.charge_efficiency, grid.soc_step);
    d.max_down = floor_levels(battery.max_discharge / battery.discharge_efficiency, grid.soc_step);
    d.charge_efficiency = battery.charge_efficiency;
    d.discharge_efficiency = battery.discharge_efficiency;
    d.throughput_cost = battery.throughput_cost;
    return d;
}

int soc_to_level(const DiscreteBattery& battery, double soc) {
    const int level = whole_levels(soc, battery.soc_step, "soc");
    if (level < battery.level_min || level > battery.level_max) {
        throw Error(ErrorCode::InvalidArgument, "soc " + text::format_double(soc) + " outside [soc_min, soc_max]");
    }
    return level;
}

std::vector<double> continuation_values(std::span<const double> prices, const DiscreteBattery& battery,
                                        std::size_t from) {
    const int levels = battery.level_max - battery.level_min + 1;
    std::vector<double> next(static_cast<std::size_t>(levels), 0.0);
    std::vector<double> cur(next.size());
    for (std::size_t t = prices.size(); t-- > from;) {
        for (int l = battery.level_min; l <= battery.level_max; ++l) {
            double best = -std::numeric_limits<double>::infinity();
            const int lo = std::max(-battery.max_down, battery.level_min - l);
            const int hi = std::min(battery.max_up, battery.level_max - l);
            for (int delta = lo; delta <= hi; ++delta) {
                const double v = battery.hour_value(prices[t], delta) +
                                 next[static_cast<std::size_t>(l + delta - battery.level_min)];
                best = std::max(best, v);
            }
            cur[static_cast<std::size_t>(l - battery.level_min)] = best;
        }
        std::swap(cur, next);
    }
    return next;
}

std::vector<FirstStageOption> first_stage_options(const ScenarioSet& set, const Product& product,
                                                  const BatteryParams& battery, double soc,
                                                  const DispatchGrid& grid) {
    const DiscreteBattery db = discretize(battery, grid);
    const int level = soc_to_level(db, soc);

    std::vector<std::vector<double>> tails;
    tails.reserve(set.size());
    for (const auto& s : set.scenarios()) {
        const auto prices = s.trajectory(product);
        if (prices.size() != set.horizon()) throw Error(ErrorCode::HorizonMismatch, "scenario horizon differs");
        tails.push_back(continuation_values(prices, db, 1));
    }

    std::vector<FirstStageOption> options;
    const int lo = std::max(-db.max_down, db.level_min - level);
    const int hi = std::min(db.max_up, db.level_max - level);
    for (int delta = lo; delta <= hi; ++delta) {
        double ev = 0.0;
        for (std::size_t k = 0; k < set.size(); ++k) {
            const double price = set.scenarios()[k].trajectory(product)[0];
            const double tail = tails[k][static_cast<std::size_t>(level + delta - db.level_min)];
            ev += set.probabilities()[k] * (db.hour_value(price, delta) + tail);
        }
        options.push_back({delta, db.action_mw(delta), ev});
    }
    return options;
}

DispatchDecision optimal_first_action(const ScenarioSet& set, const Product& product, const BatteryParams& battery,
                                      double soc, const DispatchGrid& grid, Timestamp hour) {
    const auto options = first_stage_options(set, product, battery, soc, grid);
    const FirstStageOption* best = &options.front();
    for (const auto& o : options) {
        if (o.expected_value > best->expected_value) {
            best = &o;
        } else if (o.expected_value == best->expected_value) {
            const double a = std::abs(o.action_mw);
            const double b = std::abs(best->action_mw);
            if (a < b || (a == b && o.action_mw > best->action_mw)) best = &o;
        }
    }
    return {hour, best->action_mw, best->soc_delta, best->expected_value};
}

}  // namespace sforge
