#pragma once

#include "dcm/corpus_ingest.hpp"
#include "dcm/count_matrix.hpp"
#include "dcm/factorization.hpp"
#include "dcm/feature_id.hpp"
#include "dcm/matrix.hpp"
#include "dcm/metric.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace dcm {

enum class KMeansInit {
    RandomPartition,  // shuffle points, deal them round-robin into k groups
    PlusPlus,         // k-means++ seeding
};

struct KMeansConfig {
    std::size_t k = 2000;
    std::size_t runs = 50;
    std::size_t max_iter = 35;
    std::uint64_t seed = 0;
    std::size_t rank = 0;  // latent dimensions used; 0 = all
    bool weight_by_sigma = false;
    KMeansInit init = KMeansInit::RandomPartition;

    // Throws dcm::Error unless 1 <= k <= points, runs >= 1, max_iter >= 1.
    void validate(std::size_t points) const;
};

struct Clustering {
    std::vector<std::size_t> assignment;  // point -> cluster in [0, k)
    Matrix means;                         // k x dims
    double objective = 0.0;               // within-cluster sum of squares

    // Filled by kmeans(): which restart won and every restart's final objective.
    std::size_t best_run = 0;
    std::vector<double> run_objectives;
};

struct LloydRun {
    Clustering result;
    // Objective after initialization and after every update step.
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    bool converged = false;  // assignments stopped changing before max_iter
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double kmeans_objective(const Matrix& points, const std::vector<std::size_t>& assignment, const Matrix& means);

// Per-restart seed derived from (root seed, run index).
std::uint64_t run_seed(std::uint64_t root, std::size_t run);

// One Lloyd run: nearest-mean assignment (ties to the lowest cluster id), mean
// update, empty clusters reseeded with the point farthest from its mean. Stops
// when assignments are unchanged or after max_iter iterations.
LloydRun lloyd_run(const Matrix& points, std::size_t k, std::size_t max_iter, std::uint64_t seed,
                   KMeansInit init = KMeansInit::RandomPartition);

// Best of cfg.runs restarts (lowest objective, ties to the lowest run index).
// Restarts run in parallel; the result does not depend on thread scheduling.
Clustering kmeans(const Matrix& points, const KMeansConfig& cfg);

// Rows of U restricted to the first `rank` columns (0 = all), optionally
// scaling column j by sigma_j.
Matrix clustering_points(const FactoredMatrix& f, std::size_t rank = 0, bool weight_by_sigma = false);

struct ClusterLookup {
    std::map<FeatureId, FeatureId> medoid_of;                // member -> medoid
    std::map<FeatureId, std::vector<FeatureId>> members_of;  // medoid -> sorted members (incl. itself)
};

// Medoid of each cluster = member closest to the cluster mean, ties broken by
// the smaller FeatureId.
ClusterLookup build_lookup(const Clustering& c, const std::vector<FeatureId>& feature_order, const Matrix& points);

struct MergedCounts {
    CountMatrix merged;   // one row per medoid: elementwise sum of its members' raw rows
    CountMatrix members;  // untouched raw rows of every clustered feature
};

MergedCounts merge_cluster_vectors(const CountMatrix& m, const ClusterLookup& lookup);

struct BeforeAfterRow {
    FeatureId medoid;
    std::size_t members = 0;
    std::optional<double> before;  // medoid's own row
    std::optional<double> after;   // merged row
};

// One row per medoid in FeatureId order.
std::vector<BeforeAfterRow> recorrelate(const MergedCounts& merged, const ClusterLookup& lookup,
                                        const GsrVector& gsr, const MetricSpec& metric);

} // namespace dcm
