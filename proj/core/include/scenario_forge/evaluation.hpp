#pragma once

// Scenario-set quality ("stoch metric", SM). For each horizon step t with
// target T_t, scenario values F_k,t and weights W_k:
//
//   mu_error_t = | T_t - sum_k W_k F_k,t / sum_k W_k |
//   U_t        = max(T_t - max_k F_k,t, 0)
//   L_t        = max(min_k F_k,t - T_t, 0)
//   SM         = (1/H) sum_t (mu_error_t + U_t + L_t)
//
// The outer mean runs over time steps; the max/min run over scenarios.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "scenario_forge/data_model.hpp"
#include "scenario_forge/forecast_io.hpp"

namespace sforge {

struct SmStep {
    double mu_error = 0.0;
    double upper = 0.0;  // U: target above the envelope
    double lower = 0.0;  // L: target below the envelope
};

struct SmReport {
    std::vector<SmStep> per_step;
    double sm = 0.0;
    std::size_t horizon() const { return per_step.size(); }
};

/// Errors: HorizonMismatch, MissingProduct.
SmReport stoch_metric(const ScenarioSet& set, std::span<const double> target, const Product& product);

/// Raw form on bare trajectories with unnormalized non-negative weights.
/// Errors: HorizonMismatch, InvalidArgument (no scenarios, weights sum <= 0).
SmReport stoch_metric(std::span<const std::vector<double>> scenarios, std::span<const double> weights,
                      std::span<const double> target);

/// Mean absolute error of the forecast's 0.5 level against `target`.
/// Errors: HorizonMismatch, InvalidArgument (no median level).
double forecast_mae(const QuantileForecast& forecast, std::span<const double> target);

struct SelectorRun {
    std::string label;
    std::vector<SmReport> reports;
};

struct ComparisonRow {
    std::string label;
    std::size_t decisions = 0;
    double mean_sm = 0.0;
    /// 100 * (reference - mean) / reference against the first run.
    double improvement_pct = 0.0;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
};

/// Mean SM per label and improvement relative to the first run.
/// Errors: EmptyRun (no runs, or a run with no reports).
Comparison compare_selectors(std::span<const SelectorRun> runs);

/// `label,mean_sm,decisions,improvement_pct`
void write_comparison_csv(std::ostream& out, const Comparison& cmp);
void write_comparison_text(std::ostream& out, const Comparison& cmp);
/// `label,decision,sm`
void write_per_decision_csv(std::ostream& out, std::span<const SelectorRun> runs);

/// `series,step,value,probability`; series is `target` or `scenario_<k>`
/// (k 1-based in set order); the target rows carry an empty probability.
void write_plot_data(std::ostream& out, const ScenarioSet& set, std::span<const double> target,
                     const Product& product);

}  // namespace sforge
