#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scenario_forge/data_model.hpp"

namespace sforge {

/// Seeded regime-switching market used by the bundled fixture and tests.
///
/// Each day is in a mild or a stressed regime (a two-state Markov chain).
/// RT prices are a persistent daily level times a regime-specific intraday
/// shape; stressed days carry an afternoon spike whose hour varies. The
/// regime shows up in the load forecast, so it is visible to feature-based
/// selection. Products: ENERGY_RT, ENERGY_DA, LOAD_FCST, RENEW_FCST.
struct SyntheticMarketSpec {
    Timestamp start = Timestamp::from_civil(2023, 1, 2, 0);
    std::size_t days = 110;
    std::uint64_t seed = 20230701;
    double regime_stay_probability = 0.85;
};

std::vector<HourlySeries> generate_synthetic_market(const SyntheticMarketSpec& spec);

}  // namespace sforge
