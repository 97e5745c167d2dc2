#include "dcm/clustering.hpp"

#include "dcm/correlation.hpp"
#include "dcm/error.hpp"
#include "dcm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace dcm {

namespace {

using Rng = std::mt19937_64;

// Unbiased draw from [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return static_cast<std::size_t>(draw % bound);
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Matrix compute_means(const Matrix& points, const std::vector<std::size_t>& assignment, std::size_t k) {
    Matrix means(k, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < points.rows(); ++p) {
        const auto c = assignment[p];
        ++counts[c];
        auto dst = means.row(c);
        const auto src = points.row(p);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        const double inv = 1.0 / static_cast<double>(counts[c]);
        for (auto& v : means.row(c)) v *= inv;
    }
    return means;
}

std::size_t nearest_mean(std::span<const double> point, const Matrix& means) {
    std::size_t best = 0;
    double best_d = squared_distance(point, means.row(0));
    for (std::size_t c = 1; c < means.rows(); ++c) {
        const double d = squared_distance(point, means.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Moves the point farthest from its (pre-update) mean into each empty cluster.
// Only clusters with at least two members donate, so no new empties appear.
void repair_empty_clusters(const Matrix& points, std::vector<std::size_t>& assignment, Matrix& means,
                           std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (auto c : assignment) ++counts[c];
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (counts[empty] != 0) continue;
        std::size_t far = points.rows();
        double far_d = -1.0;
        for (std::size_t p = 0; p < points.rows(); ++p) {
            const auto c = assignment[p];
            if (counts[c] < 2) continue;
            const double d = squared_distance(points.row(p), means.row(c));
            if (d > far_d) {
                far_d = d;
                far = p;
            }
        }
        if (far == points.rows()) throw Error("k-means: no point available to reseed an empty cluster");
        --counts[assignment[far]];
        assignment[far] = empty;
        counts[empty] = 1;
        std::copy(points.row(far).begin(), points.row(far).end(), means.row(empty).begin());
    }
}

std::vector<std::size_t> assign_all(const Matrix& points, const Matrix& means) {
    std::vector<std::size_t> out(points.rows());
    for (std::size_t p = 0; p < points.rows(); ++p) out[p] = nearest_mean(points.row(p), means);
    return out;
}

std::vector<std::size_t> random_partition(std::size_t m, std::size_t k, Rng& rng) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    std::vector<std::size_t> assignment(m);
    for (std::size_t i = 0; i < m; ++i) assignment[perm[i]] = i % k;
    return assignment;
}

Matrix plus_plus_centers(const Matrix& points, std::size_t k, Rng& rng) {
    const auto m = points.rows();
    Matrix centers(k, points.cols());
    std::vector<double> d2(m, std::numeric_limits<double>::infinity());
    std::size_t pick = uniform_index(rng, m);
    for (std::size_t c = 0; c < k; ++c) {
        std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
        double total = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            d2[p] = std::min(d2[p], squared_distance(points.row(p), centers.row(c)));
            total += d2[p];
        }
        if (c + 1 == k) break;
        if (total <= 0.0) {
            pick = uniform_index(rng, m);
            continue;
        }
        double target = uniform_unit(rng) * total;
        pick = m - 1;
        for (std::size_t p = 0; p < m; ++p) {
            target -= d2[p];
            if (target < 0.0) {
                pick = p;
                break;
            }
        }
    }
    return centers;
}

} // namespace

void KMeansConfig::validate(std::size_t points) const {
    if (k < 1) throw Error("k-means: k must be >= 1");
    if (runs < 1) throw Error("k-means: runs must be >= 1");
    if (max_iter < 1) throw Error("k-means: max_iter must be >= 1");
    if (k > points) {
        throw Error("k-means: k=" + std::to_string(k) + " exceeds the number of points (" + std::to_string(points) +
                    ")");
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

double kmeans_objective(const Matrix& points, const std::vector<std::size_t>& assignment, const Matrix& means) {
    double s = 0.0;
    for (std::size_t p = 0; p < points.rows(); ++p) s += squared_distance(points.row(p), means.row(assignment[p]));
    return s;
}

std::uint64_t run_seed(std::uint64_t root, std::size_t run) {
    const auto r = static_cast<std::uint64_t>(run);
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

LloydRun lloyd_run(const Matrix& points, std::size_t k, std::size_t max_iter, std::uint64_t seed, KMeansInit init) {
    const auto m = points.rows();
    if (k < 1 || k > m) throw Error("k-means: k must be in [1, number of points]");
    if (points.cols() < 1) throw Error("k-means: points need at least one dimension");
    Rng rng(seed);

    LloydRun run;
    auto& assignment = run.result.assignment;
    if (init == KMeansInit::RandomPartition) {
        assignment = random_partition(m, k, rng);
    } else {
        Matrix centers = plus_plus_centers(points, k, rng);
        assignment = assign_all(points, centers);
        repair_empty_clusters(points, assignment, centers, k);
    }
    Matrix means = compute_means(points, assignment, k);
    run.objective_history.push_back(kmeans_objective(points, assignment, means));

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        auto next = assign_all(points, means);
        repair_empty_clusters(points, next, means, k);
        const bool changed = next != assignment;
        ++run.iterations;
        if (!changed) {
            run.converged = true;
            break;
        }
        assignment = std::move(next);
        means = compute_means(points, assignment, k);
        run.objective_history.push_back(kmeans_objective(points, assignment, means));
    }
    run.result.means = std::move(means);
    run.result.objective = run.objective_history.back();
    return run;
}

Clustering kmeans(const Matrix& points, const KMeansConfig& cfg) {
    cfg.validate(points.rows());
    if (std::any_of(points.data().begin(), points.data().end(), [](double v) { return !std::isfinite(v); })) {
        throw Error("k-means: points contain non-finite values");
    }
    std::vector<LloydRun> runs(cfg.runs);
    parallel_for(cfg.runs, [&](std::size_t r) {
        runs[r] = lloyd_run(points, cfg.k, cfg.max_iter, run_seed(cfg.seed, r), cfg.init);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].result.objective < runs[best].result.objective) best = r;
    }
    Clustering out = std::move(runs[best].result);
    out.best_run = best;
    out.run_objectives.reserve(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        out.run_objectives.push_back(r == best ? out.objective : runs[r].result.objective);
    }
    return out;
}

Matrix clustering_points(const FactoredMatrix& f, std::size_t rank, bool weight_by_sigma) {
    const auto dims = rank == 0 ? f.rank() : rank;
    if (dims > f.rank()) {
        throw Error("clustering rank " + std::to_string(dims) + " exceeds factor rank " + std::to_string(f.rank()));
    }
    Matrix points(f.u.rows(), dims);
    for (std::size_t i = 0; i < f.u.rows(); ++i) {
        for (std::size_t j = 0; j < dims; ++j) points(i, j) = f.u(i, j) * (weight_by_sigma ? f.sigma[j] : 1.0);
    }
    return points;
}

ClusterLookup build_lookup(const Clustering& c, const std::vector<FeatureId>& feature_order, const Matrix& points) {
    if (feature_order.size() != points.rows() || c.assignment.size() != points.rows()) {
        throw Error("lookup: clustering, feature order and points disagree in size");
    }
    const auto k = c.means.rows();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t p = 0; p < c.assignment.size(); ++p) members.at(c.assignment[p]).push_back(p);

    ClusterLookup lookup;
    for (std::size_t cl = 0; cl < k; ++cl) {
        if (members[cl].empty()) continue;
        std::size_t medoid = members[cl].front();
        double best_d = squared_distance(points.row(medoid), c.means.row(cl));
        for (auto p : members[cl]) {
            const double d = squared_distance(points.row(p), c.means.row(cl));
            if (d < best_d || (d == best_d && feature_order[p] < feature_order[medoid])) {
                best_d = d;
                medoid = p;
            }
        }
        auto& list = lookup.members_of[feature_order[medoid]];
        for (auto p : members[cl]) {
            list.push_back(feature_order[p]);
            lookup.medoid_of[feature_order[p]] = feature_order[medoid];
        }
        std::sort(list.begin(), list.end());
    }
    return lookup;
}

MergedCounts merge_cluster_vectors(const CountMatrix& m, const ClusterLookup& lookup) {
    MergedCounts out{CountMatrix(m.days()), CountMatrix(m.days())};
    for (const auto& [medoid, members] : lookup.members_of) {
        DailyCounts sum(static_cast<std::size_t>(m.days()), 0);
        for (const auto& f : members) {
            if (!m.contains(f)) throw Error("lookup references feature " + f.str() + " absent from the count matrix");
            const auto& row = m.row(f);
            for (const auto& [day, cnt] : row.entries) sum[static_cast<std::size_t>(day)] += cnt;
            out.members.set_row(f, row);
        }
        out.merged.set_row(medoid, sum);
    }
    return out;
}

std::vector<BeforeAfterRow> recorrelate(const MergedCounts& merged, const ClusterLookup& lookup,
                                        const GsrVector& gsr, const MetricSpec& metric) {
    CountMatrix originals(merged.merged.days());
    for (const auto& [medoid, row] : merged.merged.rows()) originals.set_row(medoid, merged.members.row(medoid));
    const auto before = correlate_matrix(originals, gsr, metric);
    const auto after = correlate_matrix(merged.merged, gsr, metric);

    std::vector<BeforeAfterRow> out;
    out.reserve(before.size());
    std::size_t i = 0;
    for (const auto& [medoid, row] : merged.merged.rows()) {
        const auto it = lookup.members_of.find(medoid);
        const std::size_t count = it == lookup.members_of.end() ? 1 : it->second.size();
        out.push_back({medoid, count, before[i], after[i]});
        ++i;
    }
    return out;
}

} // namespace dcm
