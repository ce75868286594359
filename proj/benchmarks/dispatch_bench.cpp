#include <benchmark/benchmark.h>

#include <random>

#include "scenario_forge/dispatch.hpp"

namespace {

using namespace sforge;

// Args: scenarios, SoC grid levels. Horizon 16.
void BM_OptimalFirstAction(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> price(40, 20);
    const Product rt("ENERGY_RT");
    const auto k = static_cast<std::size_t>(state.range(0));
    std::vector<CandidateScenario> scenarios;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> p(16);
        for (auto& e : p) e = price(rng);
        scenarios.emplace_back(Timestamp(static_cast<std::int64_t>(i)), std::map<Product, std::vector<double>>{{rt, p}});
    }
    const ScenarioSet set(scenarios, std::vector<double>(k, 1.0 / static_cast<double>(k)), 16);

    BatteryParams battery;
    battery.energy_capacity = 4.0;
    battery.soc_max = 4.0;
    battery.initial_soc = 2.0;
    battery.charge_efficiency = 0.95;
    battery.discharge_efficiency = 0.95;
    const DispatchGrid grid{4.0 / static_cast<double>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(optimal_first_action(set, rt, battery, 2.0, grid));
}
BENCHMARK(BM_OptimalFirstAction)->Args({10, 20})->Args({10, 80})->Args({50, 20});

}  // namespace
