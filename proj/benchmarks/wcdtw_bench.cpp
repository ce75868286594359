#include <benchmark/benchmark.h>

#include <random>

#include "scenario_forge/forecast_io.hpp"
#include "scenario_forge/selection.hpp"
#include "scenario_forge/wcdtw.hpp"

namespace {

using namespace sforge;

QuantileTrajectory random_trajectory(std::mt19937_64& rng, std::size_t steps) {
    std::normal_distribution<double> v(40, 15);
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < steps; ++s) {
        const double m = v(rng);
        rows.push_back({m - 8, m - 3, m, m + 3, m + 8});
    }
    return QuantileTrajectory(default_quantile_levels(), rows);
}

// Arg: band half-width (-1 for unbounded). Horizon 16, five levels.
void BM_WcdtwDistance(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> v(40, 15);
    const auto y = random_trajectory(rng, 16);
    std::vector<double> x(16);
    for (auto& e : x) e = v(rng);
    const auto window = state.range(0) < 0 ? WcdtwConfig::kUnbounded : static_cast<std::size_t>(state.range(0));
    const WcdtwConfig cfg(window, default_quantile_levels(), normal_quantile_weights(default_quantile_levels()));
    for (auto _ : state) benchmark::DoNotOptimize(wcdtw_distance(x, y, cfg));
}
BENCHMARK(BM_WcdtwDistance)->Arg(0)->Arg(2)->Arg(4)->Arg(-1);

// One proposed-selector decision: score a pool of `range(0)` candidates.
void BM_SelectScenarios(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> v(40, 15);
    const Product rt("ENERGY_RT");
    std::vector<CandidateScenario> pool;
    for (int i = 0; i < state.range(0); ++i) {
        std::vector<double> t(16);
        for (auto& e : t) e = v(rng);
        pool.emplace_back(Timestamp(i), std::map<Product, std::vector<double>>{{rt, t}});
    }
    const ForecastMap f{{rt, QuantileForecast{Timestamp{}, rt, random_trajectory(rng, 16)}}};
    const auto cfg = default_selection_config(rt);
    for (auto _ : state) benchmark::DoNotOptimize(select_scenarios(pool, f, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectScenarios)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
