#include "scenario_forge/backtest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {
namespace {

constexpr double kMedian = 0.5;

std::vector<double> stats_of(const std::vector<Product>& products, const auto& trajectory_for) {
    std::vector<double> out;
    for (const auto& p : products) {
        const auto s = trajectory_stats(trajectory_for(p));
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

int max_lag(const FeatureSpec& spec) {
    int lag = 0;
    for (const auto& l : spec.lags) lag = std::max(lag, l.hours);
    return lag;
}

[[noreturn]] void rethrow_at(const Error& e, Timestamp hour) {
    throw Error(e.code(), "at " + hour.to_string() + ": " + e.detail());
}

void validate(const BacktestConfig& cfg) {
    if (cfg.horizon < 1) throw Error(ErrorCode::Config, "horizon");
    if (cfg.clusters < 1) throw Error(ErrorCode::Config, "clustering.k");
    if (cfg.forecasts.empty()) {
        if (cfg.analog_source == AnalogSource::RecentDays && cfg.analog_lookback_days < 2) {
            throw Error(ErrorCode::Config, "forecast.lookback_days");
        }
        if (cfg.analog_source == AnalogSource::Pattern) {
            if (cfg.analog_members < 2) throw Error(ErrorCode::Config, "forecast.members");
            if (cfg.analog_context_hours < 1) throw Error(ErrorCode::Config, "forecast.context_hours");
        }
    }
    if (!(cfg.period_start < cfg.period_end)) throw Error(ErrorCode::Config, "period");
    cfg.selection.validate();
    cfg.battery.validate();
    if (cfg.target_stats) {
        const auto& levels = cfg.selection.wcdtw.levels();
        if (std::find(levels.begin(), levels.end(), kMedian) == levels.end()) {
            throw Error(ErrorCode::Config, "wcdtw.quantile_levels");
        }
    }
}

}  // namespace

std::string_view to_string(SelectorKind kind) {
    return kind == SelectorKind::Proposed ? "proposed" : "benchmark";
}

std::string_view to_string(AnalogSource source) {
    return source == AnalogSource::Pattern ? "pattern" : "recent_days";
}

AnalogSource parse_analog_source(std::string_view name) {
    if (name == "pattern") return AnalogSource::Pattern;
    if (name == "recent_days") return AnalogSource::RecentDays;
    throw Error(ErrorCode::Config, "forecast.source");
}

SelectorKind parse_selector(std::string_view name) {
    if (name == "proposed") return SelectorKind::Proposed;
    if (name == "benchmark") return SelectorKind::Benchmark;
    throw Error(ErrorCode::Config, "selector");
}

std::vector<Product> BacktestConfig::weighted_products() const {
    std::vector<Product> out;
    for (const auto& [p, w] : selection.product_weights) {
        if (w > 0.0) out.push_back(p);
    }
    return out;
}

std::vector<Product> BacktestConfig::carried_products() const {
    std::set<Product> all(scenario_products.begin(), scenario_products.end());
    all.insert(target_product);
    for (const auto& p : weighted_products()) all.insert(p);
    return {all.begin(), all.end()};
}

double BacktestResult::mean_sm() const {
    if (sm_trace.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : sm_trace) total += r.sm;
    return total / static_cast<double>(sm_trace.size());
}

// --- AnalogLibrary ---------------------------------------------------------

AnalogLibrary::AnalogLibrary(const MarketDataset& data, const BacktestConfig& cfg) {
    const auto carried = cfg.carried_products();
    const auto weighted = cfg.weighted_products();
    const auto [first, last] = data.common_range();
    const auto horizon = static_cast<std::int64_t>(cfg.horizon);

    const Timestamp start = cfg.training_start.value_or(first + max_lag(cfg.features));
    const Timestamp end = std::min(cfg.training_end.value_or(cfg.period_start), last);
    if (end > cfg.period_start) throw Error(ErrorCode::Config, "training.end");

    std::vector<FeatureVector> augmented;
    for (Timestamp a = start; a + horizon <= end; a += 1) {
        candidates_.push_back(extract_candidate(data, a, carried, cfg.horizon));
        market_features_.push_back(build_features(data, a, cfg.features));
        anchors_.push_back(a);
        index_.emplace(a, anchors_.size() - 1);
        if (cfg.target_stats) {
            FeatureVector fv = market_features_.back();
            fv.target_stats = stats_of(weighted, [&](const Product& p) { return candidates_.back().trajectory(p); });
            augmented.push_back(std::move(fv));
        }
    }
    if (anchors_.size() < static_cast<std::size_t>(cfg.clusters)) {
        throw Error(ErrorCode::InsufficientData, "training window holds " + std::to_string(anchors_.size()) +
                                                     " anchors for k=" + std::to_string(cfg.clusters));
    }
    benchmark_model_ = fit_clusters(market_features_, cfg.clusters, cfg.seed);
    proposed_model_ = cfg.target_stats ? fit_clusters(augmented, cfg.clusters, cfg.seed) : benchmark_model_;
}

std::vector<std::size_t> AnalogLibrary::indices_of(std::span<const Timestamp> anchors) const {
    std::vector<std::size_t> out;
    out.reserve(anchors.size());
    for (const auto& a : anchors) out.push_back(index_.at(a));
    return out;
}

// --- BacktestEngine --------------------------------------------------------

BacktestEngine::BacktestEngine(MarketDataset data, BacktestConfig cfg)
    : data_(std::move(data)), cfg_((validate(cfg), std::move(cfg))), library_(data_, cfg_) {}

ForecastMap BacktestEngine::forecasts_at(Timestamp hour) const {
    const auto products = cfg_.weighted_products();
    return forecasts_at(hour, products);
}

ForecastMap BacktestEngine::forecasts_at(Timestamp hour, std::span<const Product> products) const {
    ForecastMap out;
    if (!cfg_.forecasts.empty()) {
        for (const auto& p : products) {
            const auto it = std::find_if(cfg_.forecasts.begin(), cfg_.forecasts.end(), [&](const QuantileForecast& f) {
                return f.issue_time == hour && f.product == p;
            });
            if (it == cfg_.forecasts.end()) {
                throw Error(ErrorCode::MissingProduct, "no forecast for " + p.id() + " issued " + hour.to_string());
            }
            if (it->horizon() != cfg_.horizon) {
                throw Error(ErrorCode::HorizonMismatch, "forecast for " + p.id() + " has horizon " +
                                                            std::to_string(it->horizon()));
            }
            out.emplace(p, *it);
        }
        return out;
    }

    std::vector<CandidateScenario> members;
    const auto horizon = static_cast<std::int64_t>(cfg_.horizon);
    if (cfg_.analog_source == AnalogSource::Pattern) {
        // Same-hour library anchors whose preceding target path best matches
        // the one observed just before `hour`.
        const auto& target = data_.series(cfg_.target_product);
        const auto context = static_cast<std::int64_t>(cfg_.analog_context_hours);
        if (hour - context < target.start()) {
            throw Error(ErrorCode::InsufficientHistory, "analog context before " + target.start().to_string());
        }
        const int hour_of_day = calendar_fields(hour).hour_of_day;
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < library_.size(); ++i) {
            const Timestamp a = library_.anchors()[i];
            if (a + horizon > hour || a - context < target.start()) continue;
            if (calendar_fields(a).hour_of_day != hour_of_day) continue;
            double d2 = 0.0;
            for (std::int64_t l = 1; l <= context; ++l) {
                const double diff = *target.value_at(a - l) - *target.value_at(hour - l);
                d2 += diff * diff;
            }
            ranked.emplace_back(d2, i);
        }
        const auto n = std::min(cfg_.analog_members, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
        for (std::size_t r = 0; r < n; ++r) members.push_back(library_.candidates()[ranked[r].second]);
    } else {
        // Same-hour windows of earlier days that end no later than `hour`.
        for (int d = 1; d <= cfg_.analog_lookback_days; ++d) {
            const Timestamp a = hour - 24 * static_cast<std::int64_t>(d);
            if (a + horizon > hour) continue;
            bool covered = true;
            for (const auto& p : products) {
                const auto& s = data_.series(p);
                covered = covered && a >= s.start() && a + horizon <= s.end();
            }
            if (!covered) continue;
            members.push_back(extract_candidate(data_, a, products, cfg_.horizon));
        }
    }
    for (const auto& p : products) {
        out.emplace(p, baseline_analog_forecast(members, p, cfg_.selection.wcdtw.levels(), hour));
    }
    return out;
}

DecisionScenarios BacktestEngine::scenarios_at(Timestamp hour, SelectorKind selector) const {
    return scenarios_at(hour, selector, cfg_.selection);
}

DecisionScenarios BacktestEngine::scenarios_at(Timestamp hour, SelectorKind selector,
                                               const SelectionConfig& selection) const {
    FeatureVector current = build_features(data_, hour, cfg_.features);
    const auto& candidates = library_.candidates();
    // Only windows fully realized before the decision hour are eligible.
    const auto observed_before = [&](Timestamp anchor, Timestamp at) {
        return anchor + static_cast<std::int64_t>(cfg_.horizon) <= at;
    };

    if (selector == SelectorKind::Benchmark) {
        const auto pick = pick_cluster(library_.benchmark_model(), current);
        std::vector<CandidateScenario> pool;
        std::vector<FeatureVector> features;
        for (std::size_t i : library_.indices_of(pick.members)) {
            if (!observed_before(candidates[i].anchor(), hour)) continue;
            pool.push_back(candidates[i]);
            features.push_back(library_.market_features()[i]);
        }
        return {select_benchmark(pool, features, current, library_.benchmark_model().standardizer,
                                 selection.n_scenarios, selection.epsilon),
                pick.cluster,
                {}};
    }

    // Stats products are fixed by the library; scoring may weight others.
    const auto stats_products = cfg_.weighted_products();
    std::set<Product> needed(stats_products.begin(), stats_products.end());
    for (const auto& [p, w] : selection.product_weights) {
        if (w > 0.0) needed.insert(p);
    }
    const std::vector<Product> needed_list(needed.begin(), needed.end());
    ForecastMap forecasts = forecasts_at(hour, needed_list);
    if (cfg_.target_stats) {
        current.target_stats = stats_of(stats_products, [&](const Product& p) {
            return forecasts.at(p).trajectory.at_level(kMedian);
        });
    }
    const auto pick = pick_cluster(library_.proposed_model(), current);
    std::vector<CandidateScenario> pool;
    for (std::size_t i : library_.indices_of(pick.members)) {
        if (observed_before(candidates[i].anchor(), hour)) pool.push_back(candidates[i]);
    }
    return {select_scenarios(pool, forecasts, selection), pick.cluster, std::move(forecasts)};
}

std::vector<double> BacktestEngine::realized_target(Timestamp hour) const {
    const auto& s = data_.series(cfg_.target_product);
    const auto horizon = static_cast<std::int64_t>(cfg_.horizon);
    if (hour < s.start() || hour + horizon > s.end()) {
        throw Error(ErrorCode::DataGap, "no realized " + cfg_.target_product.id() + " for " + hour.to_string() +
                                            " + " + std::to_string(cfg_.horizon) + "h");
    }
    const auto v = s.values().subspan(static_cast<std::size_t>(hour - s.start()), cfg_.horizon);
    return {v.begin(), v.end()};
}

BacktestResult BacktestEngine::run(SelectorKind selector) const {
    const DispatchGrid grid = cfg_.grid.value_or(DispatchGrid::defaults(cfg_.battery));
    const DiscreteBattery db = discretize(cfg_.battery, grid);
    int level = soc_to_level(db, cfg_.battery.initial_soc);

    BacktestResult result;
    result.selector = selector;
    result.energy_capacity = cfg_.battery.energy_capacity;
    for (Timestamp hour = cfg_.period_start; hour < cfg_.period_end; hour += 1) {
        try {
            const auto target = realized_target(hour);
            const auto decision_set = scenarios_at(hour, selector);
            auto sm = stoch_metric(decision_set.set, target, cfg_.target_product);
            const auto decision =
                optimal_first_action(decision_set.set, cfg_.target_product, cfg_.battery, db.soc(level), grid, hour);

            level += decision.soc_delta;
            const double price = target.front();
            HourRecord rec{hour, decision.action_mw, price, price * decision.action_mw, db.soc(level), sm.sm,
                           decision.expected_value};
            if (decision.action_mw > 0) {
                result.realized.discharge_revenue += rec.revenue;
                result.realized.discharge_mwh += decision.action_mw;
            } else if (decision.action_mw < 0) {
                result.realized.charge_cost += rec.revenue;
                result.realized.charge_mwh += -decision.action_mw;
            }
            result.decisions.push_back(decision);
            result.hours.push_back(rec);
            result.sm_trace.push_back(std::move(sm));
        } catch (const Error& e) {
            rethrow_at(e, hour);
        }
    }
    return result;
}

double BacktestEngine::mean_sm(const SelectionConfig& selection, Timestamp start, Timestamp end) const {
    if (!(start < end)) throw Error(ErrorCode::InvalidArgument, "empty validation window");
    double total = 0.0;
    std::size_t n = 0;
    for (Timestamp hour = start; hour < end; hour += 1) {
        try {
            const auto target = realized_target(hour);
            const auto d = scenarios_at(hour, SelectorKind::Proposed, selection);
            total += stoch_metric(d.set, target, cfg_.target_product).sm;
            ++n;
        } catch (const Error& e) {
            rethrow_at(e, hour);
        }
    }
    return total / static_cast<double>(n);
}

// --- Reports ---------------------------------------------------------------

void write_backtest_csv(std::ostream& out, const BacktestResult& result) {
    out << "hour,action_mw,realized_price,revenue,soc,sm\n";
    for (const auto& h : result.hours) {
        out << h.hour.to_string() << ',' << text::format_double(h.action_mw) << ','
            << text::format_double(h.realized_price) << ',' << text::format_double(h.revenue) << ','
            << text::format_double(h.soc) << ',' << text::format_double(h.sm) << '\n';
    }
}

void write_backtest_summary(std::ostream& out, const BacktestResult& result, const Product& product) {
    const auto& r = result.realized;
    auto per_mwh = [](double usd, double mwh) { return mwh > 0 ? usd / mwh : 0.0; };
    out << "product,dispatch,revenue_usd,energy_mwh,usd_per_mwh\n";
    out << product.id() << ",Discharge," << text::format_double(r.discharge_revenue) << ','
        << text::format_double(r.discharge_mwh) << ',' << text::format_double(per_mwh(r.discharge_revenue, r.discharge_mwh))
        << '\n';
    out << product.id() << ",Charge," << text::format_double(r.charge_cost) << ','
        << text::format_double(r.charge_mwh) << ',' << text::format_double(per_mwh(r.charge_cost, r.charge_mwh))
        << '\n';
    out << product.id() << ",Total," << text::format_double(r.total()) << ','
        << text::format_double(r.discharge_mwh + r.charge_mwh) << ','
        << text::format_double(per_mwh(r.total(), r.discharge_mwh + r.charge_mwh)) << '\n';
}

void write_scenario_set_csv(std::ostream& out, const ScenarioSet& set) {
    out << "rank,anchor,probability,product,step,value\n";
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto& s = set.scenarios()[k];
        const auto anchor = s.anchor().to_string();
        const auto prob = text::format_double(set.probabilities()[k]);
        for (const auto& [product, traj] : s.trajectories()) {
            for (std::size_t t = 0; t < traj.size(); ++t) {
                out << (k + 1) << ',' << anchor << ',' << prob << ',' << product.id() << ',' << t << ','
                    << text::format_double(traj[t]) << '\n';
            }
        }
    }
}

ScenarioSet parse_scenario_set_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != "rank,anchor,probability,product,step,value") {
        throw Error(ErrorCode::SchemaViolation, "scenario file header must be rank,anchor,probability,product,step,value");
    }
    struct Entry {
        Timestamp anchor;
        double probability = 0.0;
        std::map<Product, std::map<std::size_t, double>> values;
    };
    std::map<std::size_t, Entry> by_rank;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto f = text::split_fields(line);
        const auto where = "line " + std::to_string(line_no);
        double rank = 0, prob = 0, step = 0, value = 0;
        if (f.size() != 6 || !text::parse_finite(f[0], rank) || !text::parse_finite(f[2], prob) ||
            !text::parse_finite(f[4], step) || !text::parse_finite(f[5], value) || rank < 1 || step < 0 ||
            f[3].empty()) {
            throw Error(ErrorCode::SchemaViolation, where);
        }
        try {
            auto& e = by_rank[static_cast<std::size_t>(rank)];
            e.anchor = Timestamp::parse(f[1]);
            e.probability = prob;
            e.values[Product(std::string(f[3]))][static_cast<std::size_t>(step)] = value;
        } catch (const Error& err) {
            throw Error(ErrorCode::SchemaViolation, where + ": " + err.detail());
        }
    }
    std::vector<CandidateScenario> scenarios;
    std::vector<double> probs;
    for (auto& [rank, e] : by_rank) {
        std::map<Product, std::vector<double>> traj;
        for (auto& [p, steps] : e.values) {
            std::vector<double> v;
            for (auto& [t, x] : steps) {
                if (t != v.size()) throw Error(ErrorCode::SchemaViolation, "rank " + std::to_string(rank) + " has a step gap");
                v.push_back(x);
            }
            traj.emplace(p, std::move(v));
        }
        try {
            scenarios.emplace_back(e.anchor, std::move(traj));
        } catch (const Error& err) {
            throw Error(ErrorCode::SchemaViolation, "rank " + std::to_string(rank) + ": " + err.detail());
        }
        probs.push_back(e.probability);
    }
    if (scenarios.empty()) throw Error(ErrorCode::SchemaViolation, "scenario file has no rows");
    const std::size_t horizon = scenarios.front().horizon();
    try {
        return ScenarioSet(std::move(scenarios), std::move(probs), horizon);
    } catch (const Error& err) {
        throw Error(ErrorCode::SchemaViolation, err.detail());
    }
}

std::vector<TuningResult> tune_weights(const BacktestEngine& engine, std::span<const WeightCandidate> candidates,
                                       Timestamp start, Timestamp end) {
    if (candidates.empty()) throw Error(ErrorCode::EmptyRun, "no weight candidates");
    std::vector<TuningResult> results;
    for (const auto& c : candidates) {
        SelectionConfig selection = engine.config().selection;
        if (!c.product_weights.empty()) selection.product_weights = c.product_weights;
        if (!c.quantile_weights.empty()) {
            const auto& w = selection.wcdtw;
            selection.wcdtw = WcdtwConfig(w.window(), w.levels(), c.quantile_weights);
        }
        results.push_back({c.label, engine.mean_sm(selection, start, end)});
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const TuningResult& a, const TuningResult& b) { return a.mean_sm < b.mean_sm; });
    return results;
}

}  // namespace sforge
