// Writes the seeded synthetic market CSV used as the bundled fixture.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scenario_forge/error.hpp"
#include "scenario_forge/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a seeded regime-switching market CSV", "make-synthetic-market"};
    sforge::SyntheticMarketSpec spec;
    std::string out_path;
    std::string start;
    app.add_option("--out", out_path, "Output CSV path")->required();
    app.add_option("--days", spec.days, "Number of days")->check(CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "RNG seed");
    app.add_option("--start", start, "First hour, ISO-8601");
    app.add_option("--stay", spec.regime_stay_probability, "Regime persistence probability")
        ->check(CLI::Range(0.0, 1.0));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR:USAGE:" << e.what() << '\n';
        return 2;
    }
    try {
        if (!start.empty()) spec.start = sforge::Timestamp::parse(start);
        const auto series = sforge::generate_synthetic_market(spec);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw sforge::Error(sforge::ErrorCode::Io, "cannot write " + out_path);
        sforge::write_market_csv(out, series);
    } catch (const sforge::Error& e) {
        std::cerr << "ERROR:" << sforge::to_string(e.code()) << ':' << e.detail() << '\n';
        return 2;
    }
    return 0;
}
