#include "scenario_forge/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "scenario_forge/error.hpp"

namespace sforge {
namespace {

using Matrix = std::vector<std::vector<double>>;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

int nearest(const Matrix& centroids, std::span<const double> p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(centroids[c], p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

Matrix kmeans_plus_plus(std::span<const std::vector<double>> points, int k, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    Matrix centroids;
    std::vector<bool> chosen(n, false);
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    centroids.push_back(points[first]);
    chosen[first] = true;

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centroids[0]);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                pick = i;
                r -= d2[i];
                if (r < 0.0) break;
            }
        } else {
            // Fewer distinct points than k: take the first unused index.
            pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        }
        chosen[pick] = true;
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
    return centroids;
}

std::vector<int> assign(const Matrix& centroids, std::span<const std::vector<double>> points) {
    std::vector<int> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest(centroids, points[i]);
    return labels;
}

void repair_empty(Matrix& centroids, std::vector<int>& labels, std::span<const std::vector<double>> points) {
    const std::size_t k = centroids.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> sizes(k, 0);
        for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
        if (sizes[c] > 0) continue;
        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto own = static_cast<std::size_t>(labels[i]);
            if (sizes[own] < 2) continue;
            const double d = squared_distance(points[i], centroids[own]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == points.size()) continue;
        centroids[c] = points[far];
        labels[far] = static_cast<int>(c);
    }
}

Matrix means(std::span<const std::vector<double>> points, const std::vector<int>& labels, const Matrix& previous) {
    const std::size_t k = previous.size();
    const std::size_t d = previous.front().size();
    Matrix sums(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        ++counts[c];
        for (std::size_t j = 0; j < d; ++j) sums[c][j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            sums[c] = previous[c];
            continue;
        }
        for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

double inertia(const Matrix& centroids, const std::vector<int>& labels, std::span<const std::vector<double>> points) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        s += squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    return s;
}

}  // namespace

std::vector<Timestamp> ClusterModel::members(int cluster) const {
    std::vector<Timestamp> out;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (assignments[i] == cluster) out.push_back(anchors[i]);
    }
    return out;
}

ClusterModel fit_kmeans(std::span<const std::vector<double>> points, std::span<const Timestamp> anchors, int k,
                        std::uint64_t seed) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::InvalidArgument,
                    std::to_string(points.size()) + " points cannot form " + std::to_string(k) + " clusters");
    }
    if (anchors.size() != points.size()) throw Error(ErrorCode::DimensionMismatch, "one anchor per point required");
    const std::size_t d = points.front().size();
    for (const auto& p : points) {
        if (p.size() != d) throw Error(ErrorCode::DimensionMismatch, "feature vectors differ in dimension");
    }
    if (k > 1 && std::all_of(points.begin(), points.end(), [&](const auto& p) { return p == points.front(); })) {
        throw Error(ErrorCode::DegenerateData, "all points identical, cannot form " + std::to_string(k) + " clusters");
    }

    std::mt19937_64 rng(seed);
    ClusterModel model;
    model.anchors.assign(anchors.begin(), anchors.end());
    Matrix centroids = kmeans_plus_plus(points, k, rng);
    std::vector<int> labels = assign(centroids, points);
    repair_empty(centroids, labels, points);
    model.inertia_trace.push_back(inertia(centroids, labels, points));

    for (int iter = 0; iter < kMaxKMeansIterations; ++iter) {
        centroids = means(points, labels, centroids);
        std::vector<int> next = assign(centroids, points);
        repair_empty(centroids, next, points);
        model.inertia_trace.push_back(inertia(centroids, next, points));
        if (next == labels) break;
        labels = std::move(next);
    }
    model.centroids = std::move(centroids);
    model.assignments = std::move(labels);
    return model;
}

ClusterModel fit_clusters(std::span<const FeatureVector> features, int k, std::uint64_t seed) {
    if (features.empty()) throw Error(ErrorCode::InvalidArgument, "no feature vectors to cluster");
    std::vector<std::vector<double>> raw;
    std::vector<Timestamp> anchors;
    raw.reserve(features.size());
    for (const auto& f : features) {
        raw.push_back(f.numeric());
        anchors.push_back(f.anchor);
    }
    Standardizer standardizer = Standardizer::fit(raw);
    std::vector<std::vector<double>> z;
    z.reserve(raw.size());
    for (const auto& r : raw) z.push_back(standardizer.transform(r));
    if (standardizer.output_dimension() == 0) {
        // Every feature constant: all points coincide.
        if (k > 1) throw Error(ErrorCode::DegenerateData, "all feature vectors identical");
    }
    ClusterModel model = fit_kmeans(z, anchors, k, seed);
    model.standardizer = std::move(standardizer);
    return model;
}

int nearest_centroid(const ClusterModel& model, std::span<const double> standardized) {
    if (model.centroids.empty()) throw Error(ErrorCode::InvalidArgument, "model has no centroids");
    if (standardized.size() != model.centroids.front().size()) {
        throw Error(ErrorCode::DimensionMismatch, "feature dimension does not match the model");
    }
    return nearest(model.centroids, standardized);
}

ClusterPick pick_cluster(const ClusterModel& model, const FeatureVector& current) {
    const auto z = model.standardizer.transform(current.numeric());
    ClusterPick pick;
    pick.cluster = nearest_centroid(model, z);
    pick.members = model.members(pick.cluster);
    return pick;
}

// --- JSON persistence ------------------------------------------------------

std::string cluster_model_to_json(const ClusterModel& model) {
    nlohmann::ordered_json j;
    j["k"] = model.k();
    j["centroids"] = model.centroids;
    j["standardizer"] = {{"mean", model.standardizer.mean()}, {"stdev", model.standardizer.stdev()}};
    auto assignments = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < model.anchors.size(); ++i) {
        assignments.push_back({{"anchor", model.anchors[i].to_string()}, {"cluster", model.assignments[i]}});
    }
    j["assignments"] = std::move(assignments);
    j["inertia_trace"] = model.inertia_trace;
    return j.dump(2) + "\n";
}

ClusterModel cluster_model_from_json(const std::string& json) {
    try {
        const auto j = nlohmann::json::parse(json);
        ClusterModel model;
        model.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
        model.standardizer = Standardizer(j.at("standardizer").at("mean").get<std::vector<double>>(),
                                          j.at("standardizer").at("stdev").get<std::vector<double>>());
        for (const auto& a : j.at("assignments")) {
            model.anchors.push_back(Timestamp::parse(a.at("anchor").get<std::string>()));
            const int c = a.at("cluster").get<int>();
            if (c < 0 || static_cast<std::size_t>(c) >= model.centroids.size()) {
                throw Error(ErrorCode::SchemaViolation, "assignment to unknown cluster " + std::to_string(c));
            }
            model.assignments.push_back(c);
        }
        if (j.contains("inertia_trace")) model.inertia_trace = j.at("inertia_trace").get<std::vector<double>>();
        if (model.centroids.empty() || j.at("k").get<std::size_t>() != model.centroids.size()) {
            throw Error(ErrorCode::SchemaViolation, "k does not match centroid count");
        }
        for (const auto& c : model.centroids) {
            if (c.size() != model.standardizer.output_dimension()) {
                throw Error(ErrorCode::SchemaViolation, "centroid dimension does not match standardizer");
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("cluster model: ") + e.what());
    }
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << cluster_model_to_json(model);
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return cluster_model_from_json(ss.str());
}

}  // namespace sforge
