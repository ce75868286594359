#pragma once

// Core market-data types shared by every stage of the pipeline: hourly
// series and their CSV form, market-condition feature vectors, and the
// horizon-length historical windows that become scenario candidates.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenario_forge/time.hpp"

namespace sforge {

/// Identifier of a traded or observed product (e.g. "ENERGY_RT").
class Product {
public:
    /// Throws Error(InvalidArgument) on an empty id.
    explicit Product(std::string id);

    const std::string& id() const { return id_; }

    auto operator<=>(const Product&) const = default;

private:
    std::string id_;
};

/// One product's values over a contiguous, gap-free range of hours.
class HourlySeries {
public:
    /// Throws Error(InvalidArgument) if `values` is empty or has non-finite entries.
    HourlySeries(Product product, Timestamp start, std::vector<double> values);

    const Product& product() const { return product_; }
    Timestamp start() const { return start_; }
    /// One past the last hour.
    Timestamp end() const { return start_ + static_cast<std::int64_t>(values_.size()); }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }

    bool contains(Timestamp t) const { return t >= start_ && t < end(); }
    std::optional<double> value_at(Timestamp t) const;

    bool operator==(const HourlySeries&) const = default;

private:
    Product product_;
    Timestamp start_;
    std::vector<double> values_;
};

/// All series of a market record, keyed by product.
class MarketDataset {
public:
    MarketDataset() = default;
    /// Throws Error(InvalidArgument) on duplicate products.
    explicit MarketDataset(std::vector<HourlySeries> series);

    bool has(const Product& p) const { return series_.contains(p); }
    /// Throws Error(MissingProduct).
    const HourlySeries& series(const Product& p) const;
    std::optional<double> value_at(const Product& p, Timestamp t) const;
    std::vector<Product> products() const;
    std::vector<HourlySeries> all() const;

    /// Intersection of all series' coverage, [first, last).
    std::pair<Timestamp, Timestamp> common_range() const;

private:
    std::map<Product, HourlySeries> series_;
};

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string product_column = "product";
    std::string value_column = "value";
};

/// Reads a long-format market CSV. Rows may arrive in any order; each
/// product must cover a contiguous run of hours with no duplicates.
/// Errors: MissingColumn, GapInSeries (first missing hour), DuplicateHour,
/// UnparseableValue (1-based line number), Io.
std::vector<HourlySeries> ingest_market_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
std::vector<HourlySeries> parse_market_csv(std::istream& in, const CsvSchema& schema = {});

/// Writes `timestamp,product,value` rows, product by product, in hour order.
void write_market_csv(std::ostream& out, std::span<const HourlySeries> series);

struct LagSpec {
    Product product;
    int hours;  // >= 1

    bool operator==(const LagSpec&) const = default;
};

struct FeatureSpec {
    std::vector<LagSpec> lags;
    /// Day-ahead forecast series, published before the hour they describe,
    /// so they are read at the anchor hour itself.
    std::optional<Product> load_product;
    std::optional<Product> renewable_product;

    /// 24h and 168h lags of ENERGY_DA and ENERGY_RT, no forecast series.
    static FeatureSpec defaults();
};

struct FeatureVector {
    Timestamp anchor;
    CalendarFields calendar{};
    std::optional<double> load_forecast;
    std::optional<double> renewable_forecast;
    std::vector<double> lagged_prices;
    /// Mean, max and stdev of target trajectories; empty unless augmented.
    std::vector<double> target_stats;

    /// Flat numeric encoding used for clustering. Calendar fields are encoded
    /// cyclically (sin/cos of hour, weekday and month) plus the weekend flag.
    std::vector<double> numeric() const;
};

/// Errors: InsufficientHistory when a lag reaches before its series starts,
/// InsufficientData when a required value is otherwise missing,
/// InvalidArgument for a lag < 1.
FeatureVector build_features(const MarketDataset& data, Timestamp anchor, const FeatureSpec& spec);

/// Population mean, max and standard deviation.
std::vector<double> trajectory_stats(std::span<const double> trajectory);

/// Per-feature z-scoring fit on a training window. Features with zero spread
/// are dropped from the transformed vector.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> stdev);

    /// Throws Error(DimensionMismatch) on ragged rows, InvalidArgument if empty.
    static Standardizer fit(std::span<const std::vector<double>> rows);

    std::vector<double> transform(std::span<const double> raw) const;

    std::size_t input_dimension() const { return mean_.size(); }
    std::size_t output_dimension() const;
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stdev() const { return stdev_; }

private:
    std::vector<double> mean_;
    std::vector<double> stdev_;  // 0 marks a dropped feature
};

/// Horizon-length trajectories of several products starting at a historical hour.
class CandidateScenario {
public:
    CandidateScenario() = default;
    /// Throws Error(InvalidArgument) if trajectories are empty or of unequal length.
    CandidateScenario(Timestamp anchor, std::map<Product, std::vector<double>> trajectories);

    Timestamp anchor() const { return anchor_; }
    std::size_t horizon() const { return horizon_; }
    bool has(const Product& p) const { return trajectories_.contains(p); }
    /// Throws Error(MissingProduct).
    std::span<const double> trajectory(const Product& p) const;
    const std::map<Product, std::vector<double>>& trajectories() const { return trajectories_; }

private:
    Timestamp anchor_;
    std::size_t horizon_ = 0;
    std::map<Product, std::vector<double>> trajectories_;
};

/// Errors: InsufficientData when any product lacks `horizon` hours from `anchor`.
CandidateScenario extract_candidate(const MarketDataset& data, Timestamp anchor,
                                    std::span<const Product> products, std::size_t horizon);

/// Selected scenarios with their probabilities.
class ScenarioSet {
public:
    /// Validates sizes, horizon, probabilities >= 0 summing to 1 within 1e-9.
    ScenarioSet(std::vector<CandidateScenario> scenarios, std::vector<double> probabilities,
                std::size_t horizon);

    std::size_t size() const { return scenarios_.size(); }
    std::size_t horizon() const { return horizon_; }
    const std::vector<CandidateScenario>& scenarios() const { return scenarios_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

private:
    std::vector<CandidateScenario> scenarios_;
    std::vector<double> probabilities_;
    std::size_t horizon_;
};

}  // namespace sforge
