#include "cli/run_config.hpp"

#include <fstream>
#include <set>

#include "scenario_forge/error.hpp"

namespace sforge::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path) { throw Error(ErrorCode::Config, path); }

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Rejects keys outside `allowed` so typos surface as config errors.
void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(path.empty() ? "<root>" : path);
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, _] : obj.items()) {
        if (!keys.contains(k)) bad(join(path, k));
    }
}

const json* child(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) bad(path);
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) bad(path);
    return v.get<std::int64_t>();
}

std::string string(const json& v, const std::string& path) {
    if (!v.is_string() || v.get<std::string>().empty()) bad(path);
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) bad(path);
    return v.get<bool>();
}

Timestamp timestamp(const json& v, const std::string& path) {
    try {
        return Timestamp::parse(string(v, path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        bad(path);
    }
}

std::vector<double> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) bad(path);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::map<Product, double> product_weights(const json& v, const std::string& path) {
    if (!v.is_object() || v.empty()) bad(path);
    std::map<Product, double> out;
    for (const auto& [k, w] : v.items()) {
        const double x = number(w, join(path, k));
        if (!(x >= 0.0)) bad(join(path, k));
        out.emplace(Product(k), x);
    }
    return out;
}

std::pair<Timestamp, Timestamp> range(const json& root, const char* key) {
    const json* r = child(root, key);
    if (!r) bad(key);
    only_keys(*r, key, {"start", "end"});
    const json* s = child(*r, "start");
    const json* e = child(*r, "end");
    if (!s) bad(std::string(key) + ".start");
    if (!e) bad(std::string(key) + ".end");
    const auto start = timestamp(*s, std::string(key) + ".start");
    const auto end = timestamp(*e, std::string(key) + ".end");
    if (!(start < end)) bad(std::string(key) + ".end");
    return {start, end};
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

std::vector<SelectorKind> RunConfig::selectors() const {
    if (selector == "both") return {SelectorKind::Benchmark, SelectorKind::Proposed};
    return {parse_selector(selector)};
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    only_keys(doc, "", {"paths", "seed", "horizon", "target_product", "scenario_products", "features", "clustering",
                        "wcdtw", "selection", "forecast", "battery", "dispatch", "period", "training", "selector",
                        "threads", "tuning"});
    RunConfig cfg;
    cfg.base_dir = base_dir;
    BacktestConfig& bt = cfg.backtest;

    // paths
    const json* paths = child(doc, "paths");
    if (!paths) bad("paths.market_csv");
    only_keys(*paths, "paths", {"market_csv", "forecast_csv", "output_dir"});
    const json* market = child(*paths, "market_csv");
    if (!market) bad("paths.market_csv");
    cfg.market_csv = string(*market, "paths.market_csv");
    if (!std::filesystem::is_regular_file(cfg.resolve(cfg.market_csv))) bad("paths.market_csv");
    if (const json* f = child(*paths, "forecast_csv")) {
        cfg.forecast_csv = string(*f, "paths.forecast_csv");
        if (!std::filesystem::is_regular_file(cfg.resolve(*cfg.forecast_csv))) bad("paths.forecast_csv");
    }
    if (const json* o = child(*paths, "output_dir")) cfg.output_dir = string(*o, "paths.output_dir");

    const json* seed = child(doc, "seed");
    if (!seed) bad("seed");
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) bad("seed");
    cfg.seed = seed->get<std::uint64_t>();
    bt.seed = cfg.seed;

    if (const json* h = child(doc, "horizon")) {
        const auto v = integer(*h, "horizon");
        if (v < 1) bad("horizon");
        bt.horizon = static_cast<std::size_t>(v);
    }
    if (const json* t = child(doc, "target_product")) bt.target_product = Product(string(*t, "target_product"));
    if (const json* sp = child(doc, "scenario_products")) {
        if (!sp->is_array()) bad("scenario_products");
        for (std::size_t i = 0; i < sp->size(); ++i) {
            bt.scenario_products.emplace_back(string((*sp)[i], "scenario_products[" + std::to_string(i) + "]"));
        }
    }

    if (const json* f = child(doc, "features")) {
        only_keys(*f, "features", {"lags", "load_product", "renewable_product"});
        if (const json* lags = child(*f, "lags")) {
            if (!lags->is_array()) bad("features.lags");
            bt.features.lags.clear();
            for (std::size_t i = 0; i < lags->size(); ++i) {
                const auto path = "features.lags[" + std::to_string(i) + "]";
                const auto& l = (*lags)[i];
                only_keys(l, path, {"product", "hours"});
                if (!l.contains("product")) bad(path + ".product");
                if (!l.contains("hours")) bad(path + ".hours");
                const auto hours = integer(l["hours"], path + ".hours");
                if (hours < 1) bad(path + ".hours");
                bt.features.lags.push_back({Product(string(l["product"], path + ".product")), static_cast<int>(hours)});
            }
        }
        if (const json* p = child(*f, "load_product")) bt.features.load_product = Product(string(*p, "features.load_product"));
        if (const json* p = child(*f, "renewable_product")) {
            bt.features.renewable_product = Product(string(*p, "features.renewable_product"));
        }
    }

    if (const json* c = child(doc, "clustering")) {
        only_keys(*c, "clustering", {"k", "seed", "target_stats"});
        if (const json* k = child(*c, "k")) {
            const auto v = integer(*k, "clustering.k");
            if (v < 1) bad("clustering.k");
            bt.clusters = static_cast<int>(v);
        }
        if (const json* s = child(*c, "seed")) {
            if (!s->is_number_integer() || s->get<std::int64_t>() < 0) bad("clustering.seed");
            bt.seed = s->get<std::uint64_t>();
        }
        if (const json* t = child(*c, "target_stats")) bt.target_stats = boolean(*t, "clustering.target_stats");
    }

    std::size_t window = bt.selection.wcdtw.window();
    std::vector<double> levels = bt.selection.wcdtw.levels();
    std::optional<std::vector<double>> qweights;
    if (const json* w = child(doc, "wcdtw")) {
        only_keys(*w, "wcdtw", {"window", "quantile_levels", "quantile_weights"});
        if (const json* win = child(*w, "window")) {
            if (win->is_string() && win->get<std::string>() == "inf") {
                window = WcdtwConfig::kUnbounded;
            } else {
                const auto v = integer(*win, "wcdtw.window");
                if (v < 0) bad("wcdtw.window");
                window = static_cast<std::size_t>(v);
            }
        }
        if (const json* l = child(*w, "quantile_levels")) levels = numbers(*l, "wcdtw.quantile_levels");
        if (const json* q = child(*w, "quantile_weights")) qweights = numbers(*q, "wcdtw.quantile_weights");
    }
    try {
        const auto weights = qweights ? *qweights : normal_quantile_weights(levels);
        bt.selection.wcdtw = WcdtwConfig(window, levels, weights);
    } catch (const Error&) {
        bad(qweights ? "wcdtw.quantile_weights" : "wcdtw.quantile_levels");
    }

    if (const json* s = child(doc, "selection")) {
        only_keys(*s, "selection", {"product_weights", "n_scenarios", "epsilon"});
        if (const json* pw = child(*s, "product_weights")) {
            bt.selection.product_weights = product_weights(*pw, "selection.product_weights");
        } else {
            bt.selection.product_weights = {{bt.target_product, 1.0}};
        }
        if (const json* n = child(*s, "n_scenarios")) {
            const auto v = integer(*n, "selection.n_scenarios");
            if (v < 1) bad("selection.n_scenarios");
            bt.selection.n_scenarios = static_cast<std::size_t>(v);
        }
        if (const json* e = child(*s, "epsilon")) bt.selection.epsilon = number(*e, "selection.epsilon");
    } else {
        bt.selection.product_weights = {{bt.target_product, 1.0}};
    }

    if (const json* f = child(doc, "forecast")) {
        only_keys(*f, "forecast", {"source", "members", "context_hours", "lookback_days"});
        if (const json* s = child(*f, "source")) bt.analog_source = parse_analog_source(string(*s, "forecast.source"));
        if (const json* m = child(*f, "members")) {
            const auto v = integer(*m, "forecast.members");
            if (v < 2) bad("forecast.members");
            bt.analog_members = static_cast<std::size_t>(v);
        }
        if (const json* c = child(*f, "context_hours")) {
            const auto v = integer(*c, "forecast.context_hours");
            if (v < 1) bad("forecast.context_hours");
            bt.analog_context_hours = static_cast<std::size_t>(v);
        }
        if (const json* d = child(*f, "lookback_days")) {
            const auto v = integer(*d, "forecast.lookback_days");
            if (v < 2) bad("forecast.lookback_days");
            bt.analog_lookback_days = static_cast<int>(v);
        }
    }

    const json* battery = child(doc, "battery");
    if (battery) {
        only_keys(*battery, "battery", {"energy_capacity", "max_charge", "max_discharge", "charge_efficiency",
                                        "discharge_efficiency", "soc_min", "soc_max", "initial_soc",
                                        "throughput_cost"});
        auto& b = bt.battery;
        auto read = [&](const char* key, double& field) {
            if (const json* v = child(*battery, key)) field = number(*v, std::string("battery.") + key);
        };
        read("energy_capacity", b.energy_capacity);
        b.soc_max = b.energy_capacity;
        read("max_charge", b.max_charge);
        read("max_discharge", b.max_discharge);
        read("charge_efficiency", b.charge_efficiency);
        read("discharge_efficiency", b.discharge_efficiency);
        read("soc_min", b.soc_min);
        read("soc_max", b.soc_max);
        b.initial_soc = b.soc_min;
        read("initial_soc", b.initial_soc);
        read("throughput_cost", b.throughput_cost);
    }
    bt.battery.validate();

    if (const json* d = child(doc, "dispatch")) {
        only_keys(*d, "dispatch", {"soc_step"});
        if (const json* s = child(*d, "soc_step")) bt.grid = DispatchGrid{number(*s, "dispatch.soc_step")};
    }
    if (!bt.grid) bt.grid = DispatchGrid::defaults(bt.battery);

    std::tie(bt.period_start, bt.period_end) = range(doc, "period");
    if (const json* t = child(doc, "training")) {
        only_keys(*t, "training", {"start", "end"});
        if (const json* s = child(*t, "start")) bt.training_start = timestamp(*s, "training.start");
        if (const json* e = child(*t, "end")) bt.training_end = timestamp(*e, "training.end");
    }

    if (const json* s = child(doc, "selector")) {
        cfg.selector = string(*s, "selector");
        if (cfg.selector != "both" && cfg.selector != "proposed" && cfg.selector != "benchmark") bad("selector");
    }
    if (const json* t = child(doc, "threads")) {
        const auto v = integer(*t, "threads");
        if (v < 1) bad("threads");
        cfg.threads = static_cast<unsigned>(v);
    }

    if (const json* t = child(doc, "tuning")) {
        only_keys(*t, "tuning", {"validation", "candidates"});
        TuningConfig tuning;
        std::tie(tuning.start, tuning.end) = range(*t, "validation");
        const json* cands = child(*t, "candidates");
        if (!cands || !cands->is_array() || cands->empty()) bad("tuning.candidates");
        for (std::size_t i = 0; i < cands->size(); ++i) {
            const auto path = "tuning.candidates[" + std::to_string(i) + "]";
            const auto& c = (*cands)[i];
            only_keys(c, path, {"label", "product_weights", "quantile_weights"});
            WeightCandidate wc;
            wc.label = c.contains("label") ? string(c["label"], path + ".label") : "candidate_" + std::to_string(i);
            if (const json* pw = child(c, "product_weights")) {
                wc.product_weights = product_weights(*pw, path + ".product_weights");
            }
            if (const json* qw = child(c, "quantile_weights")) {
                wc.quantile_weights = numbers(*qw, path + ".quantile_weights");
                if (wc.quantile_weights.size() != levels.size()) bad(path + ".quantile_weights");
            }
            tuning.candidates.push_back(std::move(wc));
        }
        cfg.tuning = std::move(tuning);
    }
    try {
        bt.selection.validate();
    } catch (const Error& e) {
        bad(e.detail());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "--config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, "--config: " + std::string(e.what()));
    }
    return parse_run_config(doc, path.parent_path());
}

nlohmann::ordered_json resolved_config_json(const RunConfig& cfg) {
    const auto& bt = cfg.backtest;
    nlohmann::ordered_json j;
    j["paths"] = {{"market_csv", cfg.market_csv},
                  {"forecast_csv", cfg.forecast_csv ? nlohmann::ordered_json(*cfg.forecast_csv) : nullptr},
                  {"output_dir", cfg.output_dir}};
    j["seed"] = cfg.seed;
    j["horizon"] = bt.horizon;
    j["target_product"] = bt.target_product.id();
    auto carried = nlohmann::ordered_json::array();
    for (const auto& p : bt.carried_products()) carried.push_back(p.id());
    j["scenario_products"] = carried;
    auto lags = nlohmann::ordered_json::array();
    for (const auto& l : bt.features.lags) lags.push_back({{"product", l.product.id()}, {"hours", l.hours}});
    j["features"] = {{"lags", lags},
                     {"load_product", bt.features.load_product ? nlohmann::ordered_json(bt.features.load_product->id())
                                                               : nullptr},
                     {"renewable_product", bt.features.renewable_product
                                               ? nlohmann::ordered_json(bt.features.renewable_product->id())
                                               : nullptr}};
    j["clustering"] = {{"k", bt.clusters}, {"seed", bt.seed}, {"target_stats", bt.target_stats}};
    const auto& w = bt.selection.wcdtw;
    j["wcdtw"] = {{"window", w.window() == WcdtwConfig::kUnbounded ? nlohmann::ordered_json("inf")
                                                                   : nlohmann::ordered_json(w.window())},
                  {"quantile_levels", w.levels()},
                  {"quantile_weights", w.weights()}};
    nlohmann::ordered_json pw = nlohmann::ordered_json::object();
    for (const auto& [p, v] : bt.selection.product_weights) pw[p.id()] = v;
    j["selection"] = {{"product_weights", pw},
                      {"n_scenarios", bt.selection.n_scenarios},
                      {"epsilon", bt.selection.epsilon}};
    j["forecast"] = {{"source", cfg.forecast_csv ? std::string("file") : std::string(to_string(bt.analog_source))},
                     {"members", bt.analog_members},
                     {"context_hours", bt.analog_context_hours},
                     {"lookback_days", bt.analog_lookback_days}};
    const auto& b = bt.battery;
    j["battery"] = {{"energy_capacity", b.energy_capacity},
                    {"max_charge", b.max_charge},
                    {"max_discharge", b.max_discharge},
                    {"charge_efficiency", b.charge_efficiency},
                    {"discharge_efficiency", b.discharge_efficiency},
                    {"soc_min", b.soc_min},
                    {"soc_max", b.soc_max},
                    {"initial_soc", b.initial_soc},
                    {"throughput_cost", b.throughput_cost}};
    j["dispatch"] = {{"soc_step", bt.grid->soc_step}};
    j["period"] = {{"start", bt.period_start.to_string()}, {"end", bt.period_end.to_string()}};
    j["training"] = {
        {"start", bt.training_start ? nlohmann::ordered_json(bt.training_start->to_string()) : nullptr},
        {"end", bt.training_end ? nlohmann::ordered_json(bt.training_end->to_string()) : nullptr}};
    j["selector"] = cfg.selector;
    j["threads"] = cfg.threads;
    if (cfg.tuning) {
        auto cands = nlohmann::ordered_json::array();
        for (const auto& c : cfg.tuning->candidates) {
            nlohmann::ordered_json cpw = nlohmann::ordered_json::object();
            for (const auto& [p, v] : c.product_weights) cpw[p.id()] = v;
            cands.push_back({{"label", c.label}, {"product_weights", cpw}, {"quantile_weights", c.quantile_weights}});
        }
        j["tuning"] = {{"validation", {{"start", cfg.tuning->start.to_string()}, {"end", cfg.tuning->end.to_string()}}},
                       {"candidates", cands}};
    }
    return j;
}

}  // namespace sforge::cli
