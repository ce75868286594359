#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scenario_forge/data_model.hpp"

namespace sforge {

/// k-means partition of historical anchors in z-scored feature space.
struct ClusterModel {
    std::vector<std::vector<double>> centroids;  // k x d, standardized space
    std::vector<Timestamp> anchors;              // training anchors, input order
    std::vector<int> assignments;                // cluster id per anchor
    Standardizer standardizer;
    /// Total within-cluster sum of squares after each Lloyd iteration.
    std::vector<double> inertia_trace;

    std::size_t k() const { return centroids.size(); }
    std::vector<Timestamp> members(int cluster) const;
};

struct ClusterPick {
    int cluster = 0;
    std::vector<Timestamp> members;
};

inline constexpr int kDefaultClusterCount = 8;
inline constexpr int kMaxKMeansIterations = 100;

/// Fits a z-scoring standardizer on `features`, then runs k-means with
/// seeded k-means++ initialization until assignments are stable or 100
/// iterations elapse. An emptied cluster is reseeded at the point farthest
/// from its current centroid.
/// Errors: InvalidArgument (k < 1 or fewer points than k), DimensionMismatch,
/// DegenerateData (all points identical with k > 1).
ClusterModel fit_clusters(std::span<const FeatureVector> features, int k, std::uint64_t seed);

/// Same algorithm on pre-standardized rows (no standardizer fitting).
ClusterModel fit_kmeans(std::span<const std::vector<double>> points, std::span<const Timestamp> anchors, int k,
                        std::uint64_t seed);

/// Nearest centroid by Euclidean distance, ties to the lowest id.
int nearest_centroid(const ClusterModel& model, std::span<const double> standardized);

/// Standardizes `current` with the model's standardizer and returns the
/// nearest cluster together with its member anchors.
ClusterPick pick_cluster(const ClusterModel& model, const FeatureVector& current);

std::string cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& json);
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

}  // namespace sforge
