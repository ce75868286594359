#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "scenario_forge/data_model.hpp"
#include "scenario_forge/forecast_io.hpp"
#include "scenario_forge/wcdtw.hpp"

namespace sforge {

using ForecastMap = std::map<Product, QuantileForecast>;

struct SelectionConfig {
    /// wf_p; products at weight 0 are never scored.
    std::map<Product, double> product_weights;
    WcdtwConfig wcdtw;
    std::size_t n_scenarios = 10;
    /// Floor applied to distances before inversion.
    double epsilon = 1e-6;
    /// Upper bound on scoring workers.
    unsigned threads = 1;

    /// Throws Error(Config) naming the offending field.
    void validate() const;
};

/// Band half-width used when none is configured.
inline constexpr std::size_t kDefaultWindow = 2;

/// One-hot weight on `target`, W = 2, default levels with normal weights.
SelectionConfig default_selection_config(const Product& target);

/// Weights proportional to the standard normal density at the probit of
/// each level, normalized to sum to 1.
std::vector<double> normal_quantile_weights(std::span<const double> levels);

struct ScoredCandidate {
    CandidateScenario candidate;
    std::map<Product, Distance> per_product_distance;
    /// sum_p wf_p * wcDTW_p; infeasible if any weighted term is.
    Distance d_c = Distance::infeasible();
};

/// Errors: MissingProduct when a weighted product lacks a trajectory or forecast.
ScoredCandidate score_candidate(const CandidateScenario& candidate, const ForecastMap& forecasts,
                                const SelectionConfig& cfg);

/// p_k = (1 / max(d_k, eps)) / sum_j (1 / max(d_j, eps)).
std::vector<double> inverse_distance_probabilities(std::span<const double> distances, double epsilon);

/// Scores the whole pool, drops infeasible candidates and orders the rest by
/// (d_c, anchor). Scoring runs on up to cfg.threads workers.
std::vector<ScoredCandidate> rank_candidates(std::span<const CandidateScenario> pool, const ForecastMap& forecasts,
                                             const SelectionConfig& cfg);

/// The N lowest-D_c candidates with inverse-distance probabilities.
/// Errors: PoolTooSmall when fewer than N feasible candidates remain.
ScenarioSet select_scenarios(std::span<const CandidateScenario> pool, const ForecastMap& forecasts,
                             const SelectionConfig& cfg);

/// Market-condition-only selector: N nearest pool members in the
/// standardizer's z-space, inverse-distance probabilities with the same
/// epsilon floor, ties to the earlier anchor.
/// Errors: PoolTooSmall, DimensionMismatch.
ScenarioSet select_benchmark(std::span<const CandidateScenario> pool, std::span<const FeatureVector> pool_features,
                             const FeatureVector& current, const Standardizer& standardizer, std::size_t n,
                             double epsilon = 1e-6);

}  // namespace sforge
