#include "scenario_forge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <boost/math/distributions/normal.hpp>

#include "scenario_forge/error.hpp"
#include "scenario_forge/parallel.hpp"

namespace sforge {

void SelectionConfig::validate() const {
    bool any_positive = false;
    for (const auto& [p, w] : product_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::Config, "selection.product_weights." + p.id());
        }
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw Error(ErrorCode::Config, "selection.product_weights");
    if (n_scenarios < 1) throw Error(ErrorCode::Config, "selection.n_scenarios");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorCode::Config, "selection.epsilon");
}

std::vector<double> normal_quantile_weights(std::span<const double> levels) {
    const boost::math::normal standard;
    std::vector<double> w;
    w.reserve(levels.size());
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level outside (0, 1)");
        w.push_back(boost::math::pdf(standard, boost::math::quantile(standard, level)));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return w;
}

SelectionConfig default_selection_config(const Product& target) {
    const auto& levels = default_quantile_levels();
    return SelectionConfig{{{target, 1.0}}, WcdtwConfig(kDefaultWindow, levels, normal_quantile_weights(levels))};
}

ScoredCandidate score_candidate(const CandidateScenario& candidate, const ForecastMap& forecasts,
                                const SelectionConfig& cfg) {
    ScoredCandidate scored{candidate, {}, Distance::infeasible()};
    double total = 0.0;
    bool feasible = true;
    for (const auto& [product, weight] : cfg.product_weights) {
        if (weight == 0.0) continue;
        const auto f = forecasts.find(product);
        if (f == forecasts.end()) throw Error(ErrorCode::MissingProduct, "no forecast for " + product.id());
        const Distance d = wcdtw_distance(candidate.trajectory(product), f->second.trajectory, cfg.wcdtw);
        scored.per_product_distance.emplace(product, d);
        if (!d.is_feasible()) {
            feasible = false;
            continue;
        }
        total += d.value() * weight;
    }
    if (feasible) scored.d_c = Distance::finite(total);
    return scored;
}

std::vector<double> inverse_distance_probabilities(std::span<const double> distances, double epsilon) {
    if (distances.empty()) throw Error(ErrorCode::InvalidArgument, "no distances");
    std::vector<double> p;
    p.reserve(distances.size());
    double total = 0.0;
    for (double d : distances) {
        p.push_back(1.0 / std::max(d, epsilon));
        total += p.back();
    }
    for (double& v : p) v /= total;
    return p;
}

std::vector<ScoredCandidate> rank_candidates(std::span<const CandidateScenario> pool, const ForecastMap& forecasts,
                                             const SelectionConfig& cfg) {
    cfg.validate();
    std::vector<std::optional<ScoredCandidate>> slots(pool.size());
    parallel_for(pool.size(), cfg.threads,
                 [&](std::size_t i) { slots[i] = score_candidate(pool[i], forecasts, cfg); });
    std::vector<ScoredCandidate> ranked;
    ranked.reserve(pool.size());
    for (auto& s : slots) {
        if (s->d_c.is_feasible()) ranked.push_back(std::move(*s));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.d_c.value() != b.d_c.value()) return a.d_c.value() < b.d_c.value();
        return a.candidate.anchor() < b.candidate.anchor();
    });
    return ranked;
}

ScenarioSet select_scenarios(std::span<const CandidateScenario> pool, const ForecastMap& forecasts,
                             const SelectionConfig& cfg) {
    auto ranked = rank_candidates(pool, forecasts, cfg);
    if (ranked.size() < cfg.n_scenarios) {
        throw Error(ErrorCode::PoolTooSmall, std::to_string(ranked.size()) + " feasible candidates for N=" +
                                                 std::to_string(cfg.n_scenarios));
    }
    ranked.resize(cfg.n_scenarios);
    std::vector<double> d;
    std::vector<CandidateScenario> chosen;
    for (auto& s : ranked) {
        d.push_back(s.d_c.value());
        chosen.push_back(std::move(s.candidate));
    }
    const std::size_t horizon = chosen.front().horizon();
    return ScenarioSet(std::move(chosen), inverse_distance_probabilities(d, cfg.epsilon), horizon);
}

ScenarioSet select_benchmark(std::span<const CandidateScenario> pool, std::span<const FeatureVector> pool_features,
                             const FeatureVector& current, const Standardizer& standardizer, std::size_t n,
                             double epsilon) {
    if (pool.size() != pool_features.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one feature vector per pool member required");
    }
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    if (pool.size() < n) {
        throw Error(ErrorCode::PoolTooSmall,
                    std::to_string(pool.size()) + " candidates for N=" + std::to_string(n));
    }
    const auto z = standardizer.transform(current.numeric());
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto zi = standardizer.transform(pool_features[i].numeric());
        double s = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) s += (z[j] - zi[j]) * (z[j] - zi[j]);
        order.emplace_back(std::sqrt(s), i);
    }
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return pool[a.second].anchor() < pool[b.second].anchor();
    });
    std::vector<double> d;
    std::vector<CandidateScenario> chosen;
    for (std::size_t k = 0; k < n; ++k) {
        d.push_back(order[k].first);
        chosen.push_back(pool[order[k].second]);
    }
    const std::size_t horizon = chosen.front().horizon();
    return ScenarioSet(std::move(chosen), inverse_distance_probabilities(d, epsilon), horizon);
}

}  // namespace sforge
