#include "scenario_forge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sforge {
namespace {

double bump(double hour, double center, double width) {
    const double d = (hour - center) / width;
    return std::exp(-0.5 * d * d);
}

// Values are rounded to cents so the CSV round-trips exactly.
double cents(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<HourlySeries> generate_synthetic_market(const SyntheticMarketSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    constexpr double kRegimeLevel[2] = {32.0, 58.0};
    const std::size_t hours = spec.days * 24;
    std::vector<double> rt, da, load, renew;
    rt.reserve(hours);
    da.reserve(hours);
    load.reserve(hours);
    renew.reserve(hours);

    int regime = 0;
    double deviation = 0.0;
    for (std::size_t d = 0; d < spec.days; ++d) {
        if (d > 0 && uniform(rng) > spec.regime_stay_probability) regime = 1 - regime;
        deviation = 0.85 * deviation + 5.0 * normal(rng);
        const double level = kRegimeLevel[regime] + deviation;
        const double spike_hour = 15.0 + std::floor(uniform(rng) * 4.0);
        const double spike_size = 0.9 + 0.8 * uniform(rng);
        const double cloud = 0.4 + 0.6 * uniform(rng);
        const bool weekend = calendar_fields(spec.start + static_cast<std::int64_t>(d * 24)).weekend;

        for (int h = 0; h < 24; ++h) {
            const double hd = h;
            double shape;
            double expected_shape;
            if (regime == 0) {
                shape = 1.0 + 0.25 * bump(hd, 8, 2) + 0.35 * bump(hd, 19, 2) - 0.2 * bump(hd, 3, 3);
                expected_shape = shape;
            } else {
                shape = 1.0 + 0.2 * bump(hd, 9, 2) + spike_size * bump(hd, spike_hour, 1.2) - 0.15 * bump(hd, 3, 3);
                expected_shape = 1.0 + 0.2 * bump(hd, 9, 2) + 0.9 * bump(hd, 16.5, 2.2) - 0.15 * bump(hd, 3, 3);
            }
            if (weekend) {
                shape *= 0.9;
                expected_shape *= 0.9;
            }
            rt.push_back(cents(level * shape + 2.5 * normal(rng)));
            da.push_back(cents(level * expected_shape + 1.5 * normal(rng)));
            const double day_shape = bump(hd, 15, 5);
            load.push_back(cents(800.0 + 260.0 * regime + 180.0 * day_shape - (weekend ? 60.0 : 0.0) +
                                 15.0 * normal(rng)));
            const double sun = std::max(0.0, std::sin(std::numbers::pi * (hd - 6.0) / 12.0));
            renew.push_back(cents(300.0 * sun * cloud + 5.0 * uniform(rng)));
        }
    }
    std::vector<HourlySeries> out;
    out.emplace_back(Product("ENERGY_DA"), spec.start, std::move(da));
    out.emplace_back(Product("ENERGY_RT"), spec.start, std::move(rt));
    out.emplace_back(Product("LOAD_FCST"), spec.start, std::move(load));
    out.emplace_back(Product("RENEW_FCST"), spec.start, std::move(renew));
    return out;
}

}  // namespace sforge
