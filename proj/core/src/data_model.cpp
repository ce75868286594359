#include "scenario_forge/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string_view>

#include "scenario_forge/error.hpp"
#include "scenario_forge/text.hpp"

namespace sforge {

Product::Product(std::string id) : id_(std::move(id)) {
    if (id_.empty()) throw Error(ErrorCode::InvalidArgument, "product id must be non-empty");
}

// --- HourlySeries ----------------------------------------------------------

HourlySeries::HourlySeries(Product product, Timestamp start, std::vector<double> values)
    : product_(std::move(product)), start_(start), values_(std::move(values)) {
    if (values_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "series " + product_.id() + " is empty");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "series " + product_.id() + " has a non-finite value");
        }
    }
}

std::optional<double> HourlySeries::value_at(Timestamp t) const {
    if (!contains(t)) return std::nullopt;
    return values_[static_cast<std::size_t>(t - start_)];
}

// --- MarketDataset ---------------------------------------------------------

MarketDataset::MarketDataset(std::vector<HourlySeries> series) {
    for (auto& s : series) {
        const Product p = s.product();
        if (!series_.emplace(p, std::move(s)).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate product " + p.id());
        }
    }
}

const HourlySeries& MarketDataset::series(const Product& p) const {
    const auto it = series_.find(p);
    if (it == series_.end()) throw Error(ErrorCode::MissingProduct, "no series for product " + p.id());
    return it->second;
}

std::optional<double> MarketDataset::value_at(const Product& p, Timestamp t) const {
    const auto it = series_.find(p);
    if (it == series_.end()) return std::nullopt;
    return it->second.value_at(t);
}

std::vector<Product> MarketDataset::products() const {
    std::vector<Product> out;
    for (const auto& [p, _] : series_) out.push_back(p);
    return out;
}

std::vector<HourlySeries> MarketDataset::all() const {
    std::vector<HourlySeries> out;
    for (const auto& [_, s] : series_) out.push_back(s);
    return out;
}

std::pair<Timestamp, Timestamp> MarketDataset::common_range() const {
    if (series_.empty()) return {Timestamp{}, Timestamp{}};
    Timestamp first = series_.begin()->second.start();
    Timestamp last = series_.begin()->second.end();
    for (const auto& [_, s] : series_) {
        first = std::max(first, s.start());
        last = std::min(last, s.end());
    }
    return {first, std::max(first, last)};
}

// --- CSV -------------------------------------------------------------------

std::vector<HourlySeries> ingest_market_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_market_csv(in, schema);
}

std::vector<HourlySeries> parse_market_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MissingColumn, "empty file, no header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);  // UTF-8 BOM

    const auto header = text::split_fields(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::MissingColumn, name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ts_col = column(schema.timestamp_column);
    const std::size_t product_col = column(schema.product_column);
    const std::size_t value_col = column(schema.value_column);
    const std::size_t needed = std::max({ts_col, product_col, value_col}) + 1;

    std::map<std::string, std::vector<std::pair<Timestamp, double>>, std::less<>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(line);
        const auto where = "line " + std::to_string(line_no);
        if (fields.size() < needed) throw Error(ErrorCode::UnparseableValue, where + ": too few fields");
        Timestamp t;
        try {
            t = Timestamp::parse(fields[ts_col]);
        } catch (const Error& e) {
            throw Error(ErrorCode::UnparseableValue, where + ": " + e.detail());
        }
        double v = 0.0;
        if (!text::parse_finite(fields[value_col], v)) {
            throw Error(ErrorCode::UnparseableValue,
                        where + ": value '" + std::string(fields[value_col]) + "'");
        }
        if (fields[product_col].empty()) throw Error(ErrorCode::UnparseableValue, where + ": empty product");
        rows[std::string(fields[product_col])].emplace_back(t, v);
    }

    std::vector<HourlySeries> out;
    for (auto& [id, entries] : rows) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> values;
        values.reserve(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i > 0) {
                const auto step = entries[i].first - entries[i - 1].first;
                if (step == 0) {
                    throw Error(ErrorCode::DuplicateHour,
                                "product " + id + " at " + entries[i].first.to_string());
                }
                if (step > 1) {
                    throw Error(ErrorCode::GapInSeries,
                                "product " + id + " missing hour " + (entries[i - 1].first + 1).to_string());
                }
            }
            values.push_back(entries[i].second);
        }
        out.emplace_back(Product(id), entries.front().first, std::move(values));
    }
    return out;
}

void write_market_csv(std::ostream& out, std::span<const HourlySeries> series) {
    out << "timestamp,product,value\n";
    for (const auto& s : series) {
        Timestamp t = s.start();
        for (double v : s.values()) {
            out << t.to_string() << ',' << s.product().id() << ',' << text::format_double(v) << '\n';
            t += 1;
        }
    }
}

// --- Features --------------------------------------------------------------

FeatureSpec FeatureSpec::defaults() {
    FeatureSpec spec;
    for (const char* id : {"ENERGY_DA", "ENERGY_RT"}) {
        spec.lags.push_back({Product(id), 24});
        spec.lags.push_back({Product(id), 168});
    }
    return spec;
}

std::vector<double> FeatureVector::numeric() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> v{
        std::sin(two_pi * calendar.hour_of_day / 24.0), std::cos(two_pi * calendar.hour_of_day / 24.0),
        std::sin(two_pi * calendar.day_of_week / 7.0),  std::cos(two_pi * calendar.day_of_week / 7.0),
        std::sin(two_pi * (calendar.month - 1) / 12.0), std::cos(two_pi * (calendar.month - 1) / 12.0),
        calendar.weekend ? 1.0 : 0.0,
    };
    if (load_forecast) v.push_back(*load_forecast);
    if (renewable_forecast) v.push_back(*renewable_forecast);
    v.insert(v.end(), lagged_prices.begin(), lagged_prices.end());
    v.insert(v.end(), target_stats.begin(), target_stats.end());
    return v;
}

FeatureVector build_features(const MarketDataset& data, Timestamp anchor, const FeatureSpec& spec) {
    FeatureVector fv;
    fv.anchor = anchor;
    fv.calendar = calendar_fields(anchor);

    auto forecast_at = [&](const Product& p) {
        const auto v = data.series(p).value_at(anchor);
        if (!v) throw Error(ErrorCode::InsufficientData, p.id() + " has no value at " + anchor.to_string());
        return *v;
    };
    if (spec.load_product) fv.load_forecast = forecast_at(*spec.load_product);
    if (spec.renewable_product) fv.renewable_forecast = forecast_at(*spec.renewable_product);

    fv.lagged_prices.reserve(spec.lags.size());
    for (const auto& lag : spec.lags) {
        if (lag.hours < 1) {
            throw Error(ErrorCode::InvalidArgument, "lag of " + lag.product.id() + " must be >= 1 hour");
        }
        const auto& s = data.series(lag.product);
        const Timestamp at = anchor - lag.hours;
        if (at < s.start()) {
            throw Error(ErrorCode::InsufficientHistory,
                        lag.product.id() + " lag " + std::to_string(lag.hours) + "h reaches " + at.to_string() +
                            ", series starts " + s.start().to_string());
        }
        const auto v = s.value_at(at);
        if (!v) throw Error(ErrorCode::InsufficientData, lag.product.id() + " has no value at " + at.to_string());
        fv.lagged_prices.push_back(*v);
    }
    return fv;
}

std::vector<double> trajectory_stats(std::span<const double> trajectory) {
    if (trajectory.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    const double n = static_cast<double>(trajectory.size());
    const double mean = std::accumulate(trajectory.begin(), trajectory.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : trajectory) ss += (v - mean) * (v - mean);
    return {mean, *std::max_element(trajectory.begin(), trajectory.end()), std::sqrt(ss / n)};
}

// --- Standardizer ----------------------------------------------------------

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stdev)
    : mean_(std::move(mean)), stdev_(std::move(stdev)) {
    if (mean_.size() != stdev_.size()) throw Error(ErrorCode::DimensionMismatch, "mean/stdev length differ");
}

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit a standardizer on no rows");
    const std::size_t d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    std::vector<double> stdev(d, 0.0);
    for (const auto& r : rows) {
        if (r.size() != d) throw Error(ErrorCode::DimensionMismatch, "feature rows differ in length");
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) stdev[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
    }
    for (std::size_t j = 0; j < d; ++j) {
        stdev[j] = std::sqrt(stdev[j] / static_cast<double>(rows.size()));
        // Relative floor: rounding noise on a constant column is not spread.
        if (stdev[j] <= 1e-12 * std::max(1.0, std::abs(mean[j]))) stdev[j] = 0.0;
    }
    return Standardizer(std::move(mean), std::move(stdev));
}

std::size_t Standardizer::output_dimension() const {
    return static_cast<std::size_t>(std::count_if(stdev_.begin(), stdev_.end(), [](double s) { return s > 0; }));
}

std::vector<double> Standardizer::transform(std::span<const double> raw) const {
    if (raw.size() != mean_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(mean_.size()) + " features, got " +
                                                      std::to_string(raw.size()));
    }
    std::vector<double> out;
    out.reserve(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        if (stdev_[j] > 0) out.push_back((raw[j] - mean_[j]) / stdev_[j]);
    }
    return out;
}

// --- Candidates and scenario sets -----------------------------------------

CandidateScenario::CandidateScenario(Timestamp anchor, std::map<Product, std::vector<double>> trajectories)
    : anchor_(anchor), trajectories_(std::move(trajectories)) {
    if (trajectories_.empty()) throw Error(ErrorCode::InvalidArgument, "candidate has no trajectories");
    horizon_ = trajectories_.begin()->second.size();
    for (const auto& [p, traj] : trajectories_) {
        if (traj.size() != horizon_ || traj.empty()) {
            throw Error(ErrorCode::InvalidArgument, "candidate trajectories must share a non-zero length");
        }
    }
}

std::span<const double> CandidateScenario::trajectory(const Product& p) const {
    const auto it = trajectories_.find(p);
    if (it == trajectories_.end()) {
        throw Error(ErrorCode::MissingProduct,
                    "candidate at " + anchor_.to_string() + " has no trajectory for " + p.id());
    }
    return it->second;
}

CandidateScenario extract_candidate(const MarketDataset& data, Timestamp anchor, std::span<const Product> products,
                                    std::size_t horizon) {
    if (horizon == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    std::map<Product, std::vector<double>> trajectories;
    for (const auto& p : products) {
        const auto& s = data.series(p);
        if (anchor < s.start() || anchor + static_cast<std::int64_t>(horizon) > s.end()) {
            throw Error(ErrorCode::InsufficientData, p.id() + " lacks " + std::to_string(horizon) +
                                                         " hours from " + anchor.to_string());
        }
        const auto offset = static_cast<std::size_t>(anchor - s.start());
        const auto v = s.values().subspan(offset, horizon);
        trajectories.emplace(p, std::vector<double>(v.begin(), v.end()));
    }
    return CandidateScenario(anchor, std::move(trajectories));
}

ScenarioSet::ScenarioSet(std::vector<CandidateScenario> scenarios, std::vector<double> probabilities,
                         std::size_t horizon)
    : scenarios_(std::move(scenarios)), probabilities_(std::move(probabilities)), horizon_(horizon) {
    if (scenarios_.empty()) throw Error(ErrorCode::InvalidArgument, "scenario set is empty");
    if (scenarios_.size() != probabilities_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "scenario and probability counts differ");
    }
    double total = 0.0;
    for (double p : probabilities_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "probabilities do not sum to 1");
    for (const auto& s : scenarios_) {
        if (s.horizon() != horizon_) {
            throw Error(ErrorCode::HorizonMismatch, "scenario at " + s.anchor().to_string() + " has horizon " +
                                                        std::to_string(s.horizon()));
        }
    }
}

}  // namespace sforge
