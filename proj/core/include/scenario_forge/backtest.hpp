#pragma once

// Rolling-horizon backtest. Historical anchors from a training window form
// an analog library: each anchor carries its horizon-length trajectories,
// its market-condition features and a cluster assignment. Every decision
// hour in the evaluation period then
//
//   1. builds the current feature vector (no data at or after the hour),
//   2. picks the matching cluster,
//   3. selects N scenarios from that cluster, either by forecast-guided
//      wcDTW distance (proposed) or by feature distance (benchmark),
//   4. scores the set with SM against the realized target trajectory,
//   5. solves the two-stage dispatch, commits the first hour, settles it at
//      the realized price and carries the SoC forward.
//
// Without a forecast file, the analog-quantile baseline forecasts from the
// same-hour library anchors whose recent target path best matches the
// current one.
//
// The proposed path clusters on market features augmented with target
// statistics (mean, max, stdev over the horizon): realized for historical
// anchors, taken from the forecast median at query time. The benchmark path
// clusters on market features alone.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenario_forge/clustering.hpp"
#include "scenario_forge/dispatch.hpp"
#include "scenario_forge/evaluation.hpp"
#include "scenario_forge/forecast_io.hpp"
#include "scenario_forge/selection.hpp"

namespace sforge {

enum class SelectorKind { Proposed, Benchmark };

/// Members of the built-in analog-quantile forecast.
enum class AnalogSource {
    /// The `analog_members` same-hour library anchors whose preceding
    /// `analog_context_hours` of the target best match the recent path.
    Pattern,
    /// Same-hour windows from the previous `analog_lookback_days` days.
    RecentDays,
};

std::string_view to_string(AnalogSource source);
/// "pattern" | "recent_days"; throws Error(Config).
AnalogSource parse_analog_source(std::string_view name);

std::string_view to_string(SelectorKind kind);
/// "proposed" | "benchmark"; throws Error(Config).
SelectorKind parse_selector(std::string_view name);

struct BacktestConfig {
    std::size_t horizon = 16;
    Product target_product{"ENERGY_RT"};
    /// Products carried in scenario trajectories; the target and every
    /// weighted product are added automatically.
    std::vector<Product> scenario_products;
    FeatureSpec features = FeatureSpec::defaults();
    int clusters = kDefaultClusterCount;
    std::uint64_t seed = 0;
    bool target_stats = true;
    SelectionConfig selection = default_selection_config(Product("ENERGY_RT"));
    AnalogSource analog_source = AnalogSource::Pattern;
    std::size_t analog_members = 10;
    std::size_t analog_context_hours = 6;
    int analog_lookback_days = 7;
    /// External forecasts replace the analog baseline when non-empty.
    std::vector<QuantileForecast> forecasts;
    BatteryParams battery;
    std::optional<DispatchGrid> grid;
    Timestamp period_start;
    Timestamp period_end;  // exclusive
    std::optional<Timestamp> training_start;
    std::optional<Timestamp> training_end;  // exclusive bound on anchor + horizon

    std::vector<Product> carried_products() const;
    std::vector<Product> weighted_products() const;
};

struct HourRecord {
    Timestamp hour;
    double action_mw = 0.0;
    double realized_price = 0.0;
    double revenue = 0.0;  // realized_price * action_mw
    double soc = 0.0;      // after the hour
    double sm = 0.0;
    double expected_value = 0.0;
};

/// Market settlement by direction, as in a revenue split table.
struct RevenueSplit {
    double discharge_revenue = 0.0;  // >= 0 for non-negative prices
    double discharge_mwh = 0.0;
    double charge_cost = 0.0;  // <= 0 for non-negative prices
    double charge_mwh = 0.0;

    double total() const { return discharge_revenue + charge_cost; }
};

struct BacktestResult {
    SelectorKind selector = SelectorKind::Proposed;
    std::vector<DispatchDecision> decisions;
    std::vector<HourRecord> hours;
    std::vector<SmReport> sm_trace;
    RevenueSplit realized;
    double energy_capacity = 0.0;

    double mean_sm() const;
};

/// Historical anchors with everything the selectors need, built once.
class AnalogLibrary {
public:
    AnalogLibrary(const MarketDataset& data, const BacktestConfig& cfg);

    std::size_t size() const { return anchors_.size(); }
    const std::vector<Timestamp>& anchors() const { return anchors_; }
    const std::vector<CandidateScenario>& candidates() const { return candidates_; }
    const std::vector<FeatureVector>& market_features() const { return market_features_; }
    const ClusterModel& benchmark_model() const { return benchmark_model_; }
    const ClusterModel& proposed_model() const { return proposed_model_; }

    std::vector<std::size_t> indices_of(std::span<const Timestamp> anchors) const;

private:
    std::vector<Timestamp> anchors_;
    std::vector<CandidateScenario> candidates_;
    std::vector<FeatureVector> market_features_;
    ClusterModel benchmark_model_;
    ClusterModel proposed_model_;
    std::map<Timestamp, std::size_t> index_;
};

struct DecisionScenarios {
    ScenarioSet set;
    int cluster = 0;
    ForecastMap forecasts;  // empty for the benchmark
};

class BacktestEngine {
public:
    /// Validates the configuration and builds the analog library.
    BacktestEngine(MarketDataset data, BacktestConfig cfg);

    const BacktestConfig& config() const { return cfg_; }
    const MarketDataset& data() const { return data_; }
    const AnalogLibrary& library() const { return library_; }

    /// Forecasts for every weighted product at `hour` (file or analog baseline).
    ForecastMap forecasts_at(Timestamp hour) const;
    ForecastMap forecasts_at(Timestamp hour, std::span<const Product> products) const;

    DecisionScenarios scenarios_at(Timestamp hour, SelectorKind selector) const;
    DecisionScenarios scenarios_at(Timestamp hour, SelectorKind selector, const SelectionConfig& selection) const;

    /// Realized target trajectory [hour, hour + H). Errors: DataGap.
    std::vector<double> realized_target(Timestamp hour) const;

    BacktestResult run(SelectorKind selector) const;
    /// Mean SM of the proposed selector over [start, end) under `selection`.
    double mean_sm(const SelectionConfig& selection, Timestamp start, Timestamp end) const;

private:
    MarketDataset data_;
    BacktestConfig cfg_;
    AnalogLibrary library_;
};

/// `hour,action_mw,realized_price,revenue,soc,sm`
void write_backtest_csv(std::ostream& out, const BacktestResult& result);
/// `product,dispatch,revenue_usd,energy_mwh,usd_per_mwh`, Discharge then Charge.
void write_backtest_summary(std::ostream& out, const BacktestResult& result, const Product& product);
/// `rank,anchor,probability,product,step,value`
void write_scenario_set_csv(std::ostream& out, const ScenarioSet& set);
/// Reads the format written by write_scenario_set_csv.
/// Errors: SchemaViolation.
ScenarioSet parse_scenario_set_csv(std::istream& in);

struct WeightCandidate {
    std::string label;
    std::map<Product, double> product_weights;
    std::vector<double> quantile_weights;  // empty keeps the engine's
};

struct TuningResult {
    std::string label;
    double mean_sm = 0.0;
};

/// Grid search over user-listed weight sets scored by mean SM of the proposed
/// selector on [start, end). Sorted by mean SM, ties in input order.
std::vector<TuningResult> tune_weights(const BacktestEngine& engine, std::span<const WeightCandidate> candidates,
                                       Timestamp start, Timestamp end);

}  // namespace sforge
