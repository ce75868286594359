#include "cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli/run_config.hpp"
#include "scenario_forge/backtest.hpp"
#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge::cli {
namespace {

namespace fs = std::filesystem;
using text::format_double;

struct Options {
    std::optional<unsigned> threads;
    std::string config;
    std::string input;
    std::string output;
    std::string at;
    std::string selector;
    std::string select_selector = "proposed";
    std::string scenarios;
    std::string plot;
    std::optional<std::size_t> n;
    std::optional<std::size_t> horizon;
    std::vector<std::string> runs;
};

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) ensure_directory(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed " + path.string());
}

Timestamp parse_at(const std::string& s) {
    try {
        return Timestamp::parse(s);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidArgument, "--at: " + s);
    }
}

RunConfig load(const Options& o) {
    auto cfg = load_run_config(o.config);
    if (o.threads) {
        if (*o.threads < 1) throw Error(ErrorCode::Config, "threads");
        cfg.threads = *o.threads;
    }
    cfg.backtest.selection.threads = cfg.threads;
    return cfg;
}

MarketDataset load_market(const RunConfig& cfg) {
    return MarketDataset(ingest_market_csv(cfg.resolve(cfg.market_csv)));
}

BacktestEngine make_engine(const RunConfig& cfg) {
    BacktestConfig bt = cfg.backtest;
    if (cfg.forecast_csv) bt.forecasts = load_forecast_file(cfg.resolve(*cfg.forecast_csv), bt.horizon);
    return BacktestEngine(load_market(cfg), std::move(bt));
}

fs::path output_dir(const RunConfig& cfg, const Options& o) {
    return o.output.empty() ? cfg.output_path() : fs::path(o.output);
}

int cmd_ingest(const Options& o, std::ostream& out) {
    const auto series = ingest_market_csv(o.input);
    out << "product,start,end,hours\n";
    for (const auto& s : series) {
        out << s.product().id() << ',' << s.start().to_string() << ',' << s.end().to_string() << ',' << s.size()
            << '\n';
    }
    if (!o.output.empty()) write_file(o.output, [&](std::ostream& f) { write_market_csv(f, series); });
    return kExitOk;
}

int cmd_cluster(const Options& o, std::ostream& out) {
    const auto cfg = load(o);
    const auto market = load_market(cfg);
    const AnalogLibrary library(market, cfg.backtest);
    const auto dir = output_dir(cfg, o);
    ensure_directory(dir);
    out << "model,cluster,members\n";
    for (const auto& [name, model] : {std::pair<std::string, const ClusterModel*>{"benchmark", &library.benchmark_model()},
                                      {"proposed", &library.proposed_model()}}) {
        save_cluster_model(*model, dir / ("cluster_" + name + ".json"));
        for (int c = 0; c < static_cast<int>(model->k()); ++c) out << name << ',' << c << ',' << model->members(c).size() << '\n';
    }
    return kExitOk;
}

int cmd_validate_forecast(const Options& o, std::ostream& out) {
    const auto forecasts = load_forecast_file(o.input, o.horizon);
    std::size_t h = forecasts.empty() ? 0 : forecasts.front().horizon();
    out << "OK forecasts=" << forecasts.size() << " horizon=" << h << '\n';
    return kExitOk;
}

int cmd_select(const Options& o, std::ostream& out) {
    auto cfg = load(o);
    if (o.n) cfg.backtest.selection.n_scenarios = *o.n;
    const auto engine = make_engine(cfg);
    const auto hour = parse_at(o.at);
    const auto selector = parse_selector(o.select_selector);
    const auto d = engine.scenarios_at(hour, selector);
    const fs::path path = o.output.empty() ? cfg.output_path() / ("scenarios_" + std::string(to_string(selector)) + ".csv")
                                           : fs::path(o.output);
    write_file(path, [&](std::ostream& f) { write_scenario_set_csv(f, d.set); });
    out << "selector=" << to_string(selector) << " cluster=" << d.cluster << " scenarios=" << d.set.size()
        << " file=" << path.string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const auto cfg = load(o);
    std::ifstream in(o.scenarios, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + o.scenarios);
    const auto set = parse_scenario_set_csv(in);
    const auto market = load_market(cfg);
    const auto hour = parse_at(o.at);
    const auto& product = cfg.backtest.target_product;
    std::vector<double> target;
    for (std::size_t j = 0; j < set.horizon(); ++j) {
        const auto v = market.value_at(product, hour + static_cast<std::int64_t>(j));
        if (!v) throw Error(ErrorCode::DataGap, product.id() + " at " + (hour + static_cast<std::int64_t>(j)).to_string());
        target.push_back(*v);
    }
    const auto report = stoch_metric(set, target, product);
    out << "step,mu_error,upper,lower\n";
    for (std::size_t j = 0; j < report.per_step.size(); ++j) {
        const auto& s = report.per_step[j];
        out << j << ',' << format_double(s.mu_error) << ',' << format_double(s.upper) << ','
            << format_double(s.lower) << '\n';
    }
    out << "sm=" << format_double(report.sm) << '\n';
    if (!o.plot.empty()) write_file(o.plot, [&](std::ostream& f) { write_plot_data(f, set, target, product); });
    return kExitOk;
}

int cmd_backtest(const Options& o, std::ostream& out) {
    auto cfg = load(o);
    if (!o.selector.empty()) {
        if (o.selector != "both") parse_selector(o.selector);
        cfg.selector = o.selector;
    }
    const auto engine = make_engine(cfg);
    const auto dir = output_dir(cfg, o);
    std::vector<SelectorRun> runs;
    for (const auto kind : cfg.selectors()) {
        const auto result = engine.run(kind);
        const std::string name(to_string(kind));
        write_file(dir / ("backtest_" + name + ".csv"), [&](std::ostream& f) { write_backtest_csv(f, result); });
        write_file(dir / ("backtest_" + name + "_summary.csv"),
                   [&](std::ostream& f) { write_backtest_summary(f, result, cfg.backtest.target_product); });
        runs.push_back({name, result.sm_trace});
        out << name << ": decisions=" << result.hours.size() << " mean_sm=" << format_double(result.mean_sm())
            << " revenue=" << format_double(result.realized.total()) << '\n';
    }
    const auto cmp = compare_selectors(runs);
    write_file(dir / "comparison.csv", [&](std::ostream& f) { write_comparison_csv(f, cmp); });
    write_file(dir / "comparison.txt", [&](std::ostream& f) { write_comparison_text(f, cmp); });
    write_file(dir / "per_decision_sm.csv", [&](std::ostream& f) { write_per_decision_csv(f, runs); });
    write_file(dir / "resolved_config.json", [&](std::ostream& f) { f << resolved_config_json(cfg).dump(2) << '\n'; });
    return kExitOk;
}

/// Reads the `sm` column of a backtest CSV.
SelectorRun read_run(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw Error(ErrorCode::InvalidArgument, "--run expects label=path, got " + spec);
    }
    SelectorRun run{spec.substr(0, eq), {}};
    const std::string path = spec.substr(eq + 1);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaViolation, path + ": empty");
    const auto header = text::split_fields(line);
    const auto col = std::find(header.begin(), header.end(), "sm");
    if (col == header.end()) throw Error(ErrorCode::MissingColumn, path + ": sm");
    const auto idx = static_cast<std::size_t>(col - header.begin());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(line);
        double sm = 0.0;
        if (idx >= fields.size() || !text::parse_finite(fields[idx], sm)) {
            throw Error(ErrorCode::UnparseableValue, path + " line " + std::to_string(lineno));
        }
        SmReport r;
        r.sm = sm;
        run.reports.push_back(std::move(r));
    }
    return run;
}

int cmd_report(const Options& o, std::ostream& out) {
    std::vector<SelectorRun> runs;
    for (const auto& spec : o.runs) runs.push_back(read_run(spec));
    const auto cmp = compare_selectors(runs);
    write_comparison_text(out, cmp);
    if (!o.output.empty()) {
        const fs::path dir(o.output);
        write_file(dir / "comparison.csv", [&](std::ostream& f) { write_comparison_csv(f, cmp); });
        write_file(dir / "comparison.txt", [&](std::ostream& f) { write_comparison_text(f, cmp); });
        write_file(dir / "per_decision_sm.csv", [&](std::ostream& f) { write_per_decision_csv(f, runs); });
    }
    return kExitOk;
}

int cmd_tune_weights(const Options& o, std::ostream& out) {
    auto cfg = load(o);
    if (!cfg.tuning) throw Error(ErrorCode::Config, "tuning");
    for (const auto& c : cfg.tuning->candidates) {
        for (const auto& [p, w] : c.product_weights) {
            if (w > 0.0) cfg.backtest.scenario_products.push_back(p);
        }
    }
    // The analog library must end before the validation window starts.
    cfg.backtest.period_start = cfg.tuning->start;
    cfg.backtest.period_end = cfg.tuning->end;
    if (cfg.backtest.training_end && *cfg.backtest.training_end > cfg.tuning->start) {
        throw Error(ErrorCode::Config, "training.end");
    }
    const auto engine = make_engine(cfg);
    const auto results = tune_weights(engine, cfg.tuning->candidates, cfg.tuning->start, cfg.tuning->end);
    const auto write = [&](std::ostream& f) {
        f << "rank,label,mean_sm\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            f << i + 1 << ',' << results[i].label << ',' << format_double(results[i].mean_sm) << '\n';
        }
    };
    write_file(output_dir(cfg, o) / "tuning.csv", write);
    write(out);
    return kExitOk;
}

std::optional<unsigned> threads_from_env() {
    const char* raw = std::getenv("SCENARIO_FORGE_THREADS");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    const std::string_view v(raw);
    unsigned n = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || end != v.data() + v.size() || n < 1) {
        throw Error(ErrorCode::Config, "SCENARIO_FORGE_THREADS");
    }
    return n;
}

std::string single_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forecast-guided scenario selection and battery dispatch backtesting", "scenario-forge"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "scenario-forge 0.1.0");

    Options o;
    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", o.threads, "Worker cap for distance scoring (env: SCENARIO_FORGE_THREADS)")
            ->check(CLI::PositiveNumber);
    };
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Run configuration (JSON)")->required();
        add_threads(sub);
    };

    auto* ingest = app.add_subcommand("ingest", "Validate a market CSV and print per-product coverage");
    ingest->add_option("--input", o.input, "Long-format market CSV (timestamp,product,value)")->required();
    ingest->add_option("--out", o.output, "Write the normalized, time-sorted CSV here");
    add_threads(ingest);

    auto* cluster = app.add_subcommand("cluster", "Fit the analog library's cluster models and save them");
    add_config(cluster);
    cluster->add_option("--out", o.output, "Output directory (default: config output_dir)");

    auto* validate = app.add_subcommand("validate-forecast", "Check a quantile forecast CSV");
    validate->add_option("--input", o.input, "Forecast CSV (issue_time,product,step,level,value)")->required();
    validate->add_option("--horizon", o.horizon, "Required number of steps");
    add_threads(validate);

    auto* select = app.add_subcommand("select", "Select the scenario set for one decision hour");
    add_config(select);
    select->add_option("--at", o.at, "Decision hour, ISO-8601")->required();
    select->add_option("--selector", o.select_selector, "proposed | benchmark")->capture_default_str();
    select->add_option("--n", o.n, "Override the number of scenarios")->check(CLI::PositiveNumber);
    select->add_option("--out", o.output, "Scenario-set CSV path");

    auto* evaluate = app.add_subcommand("evaluate", "Score a scenario-set file against the realized target");
    add_config(evaluate);
    evaluate->add_option("--scenarios", o.scenarios, "Scenario-set CSV written by select")->required();
    evaluate->add_option("--at", o.at, "Decision hour the set was built for")->required();
    evaluate->add_option("--plot", o.plot, "Write plot data CSV (series,step,value,probability)");

    auto* backtest = app.add_subcommand("backtest", "Run the rolling-horizon dispatch backtest");
    add_config(backtest);
    backtest->add_option("--selector", o.selector, "proposed | benchmark | both (default: config)");
    backtest->add_option("--out", o.output, "Output directory (default: config output_dir)");

    auto* report = app.add_subcommand("report", "Compare backtest runs by mean SM");
    report->add_option("--run", o.runs, "label=path to a backtest CSV; the first run is the reference")
        ->required()
        ->take_all();
    report->add_option("--out", o.output, "Directory for comparison.csv, comparison.txt, per_decision_sm.csv");
    add_threads(report);

    auto* tune = app.add_subcommand("tune-weights", "Grid search over product and quantile weights by mean SM");
    add_config(tune);
    tune->add_option("--out", o.output, "Output directory (default: config output_dir)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "ERROR:USAGE:" << single_line(e.what()) << '\n';
        return kExitError;
    }

    try {
        if (!o.threads) o.threads = threads_from_env();
        if (ingest->parsed()) return cmd_ingest(o, out);
        if (cluster->parsed()) return cmd_cluster(o, out);
        if (validate->parsed()) return cmd_validate_forecast(o, out);
        if (select->parsed()) return cmd_select(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (backtest->parsed()) return cmd_backtest(o, out);
        if (report->parsed()) return cmd_report(o, out);
        if (tune->parsed()) return cmd_tune_weights(o, out);
    } catch (const Error& e) {
        err << "ERROR:" << to_string(e.code()) << ':' << single_line(e.detail()) << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "ERROR:INTERNAL:" << single_line(e.what()) << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace sforge::cli
