#pragma once

// Two-stage scenario-based battery dispatch.
//
// State of charge lives on a uniform grid of `soc_step` MWh. An hourly move
// shifts the SoC by an integer number of grid levels; the metered power
// follows from the efficiencies:
//
//   charge    +d levels:  action = -d * soc_step / eta_c   (MW drawn)
//   discharge -d levels:  action = +d * soc_step * eta_d   (MW delivered)
//
// so SoC' = SoC + charge * eta_c - discharge / eta_d holds on the grid. An
// hour earns price * action - throughput_cost * |action|. The first hour's
// move is shared by every scenario; from the second hour on each scenario
// takes its own optimal path (backward DP, terminal value 0). The chosen
// move maximizes the probability-weighted value; ties go to the smallest
// |action|, then to discharge.

#include <cstddef>
#include <span>
#include <vector>

#include "scenario_forge/data_model.hpp"

namespace sforge {

struct BatteryParams {
    double energy_capacity = 1.0;  // MWh
    double max_charge = 1.0;       // MW
    double max_discharge = 1.0;    // MW
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;
    double soc_min = 0.0;  // MWh
    double soc_max = 1.0;  // MWh
    double initial_soc = 0.0;
    double throughput_cost = 0.0;  // $/MWh moved

    /// Throws Error(Config) naming the violated field.
    void validate() const;
};

struct DispatchGrid {
    double soc_step = 0.05;  // MWh

    /// energy_capacity / 20.
    static DispatchGrid defaults(const BatteryParams& battery);
};

/// Integer view of a battery on a grid; built by `discretize`.
struct DiscreteBattery {
    int level_min = 0;
    int level_max = 0;
    int max_up = 0;    // charge levels per hour
    int max_down = 0;  // discharge levels per hour
    double soc_step = 0.0;
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;
    double throughput_cost = 0.0;

    /// Metered MW for a move of `delta` levels (positive = charge).
    double action_mw(int delta) const;
    /// price * action - throughput_cost * |action|
    double hour_value(double price, int delta) const;
    double soc(int level) const { return soc_step * level; }
};

/// Errors: InfeasibleDiscretization when soc_min, soc_max (or `soc`) are not
/// whole multiples of the grid step, or the step is not positive.
DiscreteBattery discretize(const BatteryParams& battery, const DispatchGrid& grid);
int soc_to_level(const DiscreteBattery& battery, double soc);

struct DispatchDecision {
    Timestamp hour;
    double action_mw = 0.0;  // > 0 discharge, < 0 charge
    int soc_delta = 0;       // grid levels, > 0 charge
    double expected_value = 0.0;
};

struct FirstStageOption {
    int soc_delta = 0;
    double action_mw = 0.0;
    double expected_value = 0.0;
};

/// Optimal value of each SoC level at step `from` for one price path:
/// result[l - level_min] = best sum of hour values over steps from..H-1.
std::vector<double> continuation_values(std::span<const double> prices, const DiscreteBattery& battery,
                                        std::size_t from);

/// Expected value of every feasible first move from `soc`.
std::vector<FirstStageOption> first_stage_options(const ScenarioSet& set, const Product& product,
                                                  const BatteryParams& battery, double soc,
                                                  const DispatchGrid& grid);

/// Errors: InfeasibleDiscretization, MissingProduct, InvalidArgument.
DispatchDecision optimal_first_action(const ScenarioSet& set, const Product& product, const BatteryParams& battery,
                                      double soc, const DispatchGrid& grid, Timestamp hour = Timestamp{});

}  // namespace sforge
