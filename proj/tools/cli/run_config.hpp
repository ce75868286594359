#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenario_forge/backtest.hpp"

namespace sforge::cli {

struct TuningConfig {
    Timestamp start;
    Timestamp end;
    std::vector<WeightCandidate> candidates;
};

/// Everything a run needs, with every default materialized.
struct RunConfig {
    std::filesystem::path base_dir;  // relative paths resolve against this
    std::string market_csv;
    std::optional<std::string> forecast_csv;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::string selector = "both";  // proposed | benchmark | both
    unsigned threads = 1;
    BacktestConfig backtest;
    std::optional<TuningConfig> tuning;

    std::filesystem::path resolve(const std::string& p) const;
    std::filesystem::path output_path() const { return resolve(output_dir); }
    std::vector<SelectorKind> selectors() const;
};

/// Throws Error(Config) whose detail is the dotted path of the bad field
/// (e.g. `paths.market_csv`). Referenced input files must exist.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::ordered_json resolved_config_json(const RunConfig& cfg);

}  // namespace sforge::cli
