#include "scenario_forge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {

SmReport stoch_metric(std::span<const std::vector<double>> scenarios, std::span<const double> weights,
                      std::span<const double> target) {
    if (scenarios.empty()) throw Error(ErrorCode::InvalidArgument, "no scenarios");
    if (weights.size() != scenarios.size()) throw Error(ErrorCode::DimensionMismatch, "one weight per scenario");
    if (target.empty()) throw Error(ErrorCode::HorizonMismatch, "empty target");
    double weight_sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative scenario weight");
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) throw Error(ErrorCode::InvalidArgument, "scenario weights sum to zero");
    for (const auto& s : scenarios) {
        if (s.size() != target.size()) {
            throw Error(ErrorCode::HorizonMismatch, "scenario horizon " + std::to_string(s.size()) +
                                                        " vs target " + std::to_string(target.size()));
        }
    }

    SmReport report;
    report.per_step.reserve(target.size());
    double total = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) {
        double weighted = 0.0;
        double hi = scenarios.front()[t];
        double lo = hi;
        for (std::size_t k = 0; k < scenarios.size(); ++k) {
            const double v = scenarios[k][t];
            weighted += weights[k] * v;
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        SmStep step;
        step.mu_error = std::abs(target[t] - weighted / weight_sum);
        step.upper = std::max(target[t] - hi, 0.0);
        step.lower = std::max(lo - target[t], 0.0);
        total += step.mu_error + step.upper + step.lower;
        report.per_step.push_back(step);
    }
    report.sm = total / static_cast<double>(target.size());
    return report;
}

SmReport stoch_metric(const ScenarioSet& set, std::span<const double> target, const Product& product) {
    if (target.size() != set.horizon()) {
        throw Error(ErrorCode::HorizonMismatch, "target has " + std::to_string(target.size()) +
                                                    " steps, scenario set " + std::to_string(set.horizon()));
    }
    std::vector<std::vector<double>> trajectories;
    trajectories.reserve(set.size());
    for (const auto& s : set.scenarios()) {
        const auto traj = s.trajectory(product);
        trajectories.emplace_back(traj.begin(), traj.end());
    }
    return stoch_metric(trajectories, set.probabilities(), target);
}

double forecast_mae(const QuantileForecast& forecast, std::span<const double> target) {
    if (target.size() != forecast.horizon()) {
        throw Error(ErrorCode::HorizonMismatch, "target has " + std::to_string(target.size()) +
                                                    " steps, forecast " + std::to_string(forecast.horizon()));
    }
    const auto median = forecast.trajectory.at_level(0.5);
    double total = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) total += std::abs(median[t] - target[t]);
    return total / static_cast<double>(target.size());
}

Comparison compare_selectors(std::span<const SelectorRun> runs) {
    if (runs.empty()) throw Error(ErrorCode::EmptyRun, "no runs to compare");
    Comparison cmp;
    for (const auto& run : runs) {
        if (run.reports.empty()) throw Error(ErrorCode::EmptyRun, "run '" + run.label + "' has no decisions");
        double total = 0.0;
        for (const auto& r : run.reports) total += r.sm;
        cmp.rows.push_back({run.label, run.reports.size(), total / static_cast<double>(run.reports.size()), 0.0});
    }
    const double reference = cmp.rows.front().mean_sm;
    for (auto& row : cmp.rows) {
        row.improvement_pct = reference == 0.0 ? 0.0 : 100.0 * (reference - row.mean_sm) / reference;
    }
    return cmp;
}

void write_comparison_csv(std::ostream& out, const Comparison& cmp) {
    out << "label,mean_sm,decisions,improvement_pct\n";
    for (const auto& r : cmp.rows) {
        out << r.label << ',' << text::format_double(r.mean_sm) << ',' << r.decisions << ','
            << text::format_double(r.improvement_pct) << '\n';
    }
}

void write_comparison_text(std::ostream& out, const Comparison& cmp) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %12s %10s %14s\n", "selector", "mean SM", "decisions", "vs reference");
    out << buf;
    for (const auto& r : cmp.rows) {
        std::snprintf(buf, sizeof buf, "%-16s %12.4f %10zu %13.2f%%\n", r.label.c_str(), r.mean_sm, r.decisions,
                      r.improvement_pct);
        out << buf;
    }
}

void write_per_decision_csv(std::ostream& out, std::span<const SelectorRun> runs) {
    out << "label,decision,sm\n";
    for (const auto& run : runs) {
        for (std::size_t i = 0; i < run.reports.size(); ++i) {
            out << run.label << ',' << i << ',' << text::format_double(run.reports[i].sm) << '\n';
        }
    }
}

void write_plot_data(std::ostream& out, const ScenarioSet& set, std::span<const double> target,
                     const Product& product) {
    if (target.size() != set.horizon()) throw Error(ErrorCode::HorizonMismatch, "target/scenario horizon differ");
    out << "series,step,value,probability\n";
    for (std::size_t t = 0; t < target.size(); ++t) {
        out << "target," << t << ',' << text::format_double(target[t]) << ",\n";
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto traj = set.scenarios()[k].trajectory(product);
        const auto prob = text::format_double(set.probabilities()[k]);
        for (std::size_t t = 0; t < traj.size(); ++t) {
            out << "scenario_" << (k + 1) << ',' << t << ',' << text::format_double(traj[t]) << ',' << prob << '\n';
        }
    }
}

}  // namespace sforge
