#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "scenario_forge/clustering.hpp"
#include "scenario_forge/error.hpp"
#include "support/test_support.hpp"

namespace sforge {
namespace {

using testing::lag_only_vector;
using testing::two_clouds;

TEST(KMeans, TwoSeparatedCloudsArePure) {
    const auto fx = two_clouds(11);
    const auto model = fit_clusters(fx.features, 2, 42);
    ASSERT_EQ(model.k(), 2u);
    // Each cloud maps to a single cluster and the two clouds differ.
    std::set<int> a, b;
    for (std::size_t i = 0; i < fx.features.size(); ++i) (fx.cloud[i] == 0 ? a : b).insert(model.assignments[i]);
    EXPECT_EQ(a.size(), 1u);
    EXPECT_EQ(b.size(), 1u);
    EXPECT_NE(*a.begin(), *b.begin());

    // A held-out point near cloud A's center lands in A's cluster.
    const auto pick = pick_cluster(model, lag_only_vector(Timestamp(100000), {0.3, -0.2}));
    EXPECT_EQ(pick.cluster, *a.begin());
    EXPECT_EQ(pick.members.size(), fx.features.size() / 2);
}

TEST(KMeans, SingleClusterHoldsEverything) {
    const auto fx = two_clouds(3);
    const auto model = fit_clusters(fx.features, 1, 1);
    EXPECT_EQ(model.members(0).size(), fx.features.size());
}

TEST(KMeans, KEqualsNGivesZeroInertia) {
    const auto fx = two_clouds(5, 4);
    const auto model = fit_clusters(fx.features, static_cast<int>(fx.features.size()), 9);
    ASSERT_FALSE(model.inertia_trace.empty());
    EXPECT_NEAR(model.inertia_trace.back(), 0.0, 1e-18);
    std::set<int> used(model.assignments.begin(), model.assignments.end());
    EXPECT_EQ(used.size(), fx.features.size());
}

TEST(KMeans, Errors) {
    const auto fx = two_clouds(5, 2);
    EXPECT_THROW(fit_clusters(fx.features, 0, 1), Error);
    EXPECT_THROW(fit_clusters(fx.features, 5, 1), Error);
    std::vector<FeatureVector> same(6, lag_only_vector(Timestamp(0), {1.0, 2.0}));
    for (std::size_t i = 0; i < same.size(); ++i) same[i].anchor = Timestamp(static_cast<std::int64_t>(i));
    try {
        fit_clusters(same, 2, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
    }
    EXPECT_NO_THROW(fit_clusters(same, 1, 1));
}

TEST(KMeans, DeterministicForSeed) {
    const auto fx = two_clouds(21, 50);
    const auto a = fit_clusters(fx.features, 4, 77);
    const auto b = fit_clusters(fx.features, 4, 77);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.assignments, b.assignments);
}

TEST(KMeans, InertiaNeverIncreases) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0, 1);
    std::vector<FeatureVector> fv;
    for (int i = 0; i < 300; ++i) fv.push_back(lag_only_vector(Timestamp(i), {n(rng), n(rng), n(rng) * 3}));
    for (int k : {2, 3, 5, 8}) {
        const auto m = fit_clusters(fv, k, static_cast<std::uint64_t>(k));
        for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) {
            EXPECT_LE(m.inertia_trace[i], m.inertia_trace[i - 1] * (1 + 1e-12));
        }
        EXPECT_LE(m.inertia_trace.size(), static_cast<std::size_t>(kMaxKMeansIterations));
    }
}

TEST(KMeans, TrainingAnchorPicksItsOwnCluster) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0, 1);
    std::vector<FeatureVector> fv;
    for (int i = 0; i < 200; ++i) fv.push_back(lag_only_vector(Timestamp(i), {n(rng), n(rng)}));
    const auto m = fit_clusters(fv, 6, 3);
    for (std::size_t i = 0; i < fv.size(); ++i) EXPECT_EQ(pick_cluster(m, fv[i]).cluster, m.assignments[i]);
}

TEST(NearestCentroid, ExactHitAndTieToLowestId) {
    ClusterModel m;
    m.centroids = {{0, 0}, {2, 0}, {-2, 0}, {5, 5}};
    EXPECT_EQ(nearest_centroid(m, std::vector<double>{5, 5}), 3);
    EXPECT_EQ(nearest_centroid(m, std::vector<double>{0, 0}), 0);
    // Equidistant from clusters 1 and 2 after moving cluster 0 away.
    m.centroids[0] = {0, 100};
    EXPECT_EQ(nearest_centroid(m, std::vector<double>{0, 0}), 1);
}

TEST(Persistence, JsonRoundTrip) {
    const auto fx = two_clouds(2, 10);
    const auto m = fit_clusters(fx.features, 3, 5);
    const auto back = cluster_model_from_json(cluster_model_to_json(m));
    EXPECT_EQ(back.centroids, m.centroids);
    EXPECT_EQ(back.assignments, m.assignments);
    EXPECT_EQ(back.anchors, m.anchors);
    EXPECT_EQ(back.standardizer.mean(), m.standardizer.mean());
    EXPECT_EQ(back.standardizer.stdev(), m.standardizer.stdev());

    const auto path = std::filesystem::temp_directory_path() / "sforge_cluster_roundtrip.json";
    save_cluster_model(m, path);
    EXPECT_EQ(load_cluster_model(path).centroids, m.centroids);
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace sforge
