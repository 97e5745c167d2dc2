#pragma once

#include "dcm/corpus_ingest.hpp"
#include "dcm/feature_id.hpp"
#include "dcm/metric.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dcm {

using DailyCounts = std::vector<std::int64_t>;

// Non-zero (day, count) entries sorted by day.
struct SparseRow {
    std::vector<std::pair<int, std::int64_t>> entries;

    std::int64_t max() const;
    std::int64_t total() const;
    DailyCounts dense(int days) const;
    static SparseRow from_dense(std::span<const std::int64_t> counts);

    bool operator==(const SparseRow&) const = default;
};

// Feature x day matrix of non-negative counts. Rows are kept in FeatureId
// order so every traversal is deterministic.
class CountMatrix {
public:
    explicit CountMatrix(int days = 0) : days_(days) {}

    int days() const { return days_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    const std::map<FeatureId, SparseRow>& rows() const { return rows_; }
    bool contains(const FeatureId& id) const { return rows_.contains(id); }
    const SparseRow& row(const FeatureId& id) const;
    DailyCounts dense_row(const FeatureId& id) const { return row(id).dense(days_); }

    // Throws on a length mismatch or a negative count.
    void set_row(FeatureId id, std::span<const std::int64_t> counts);
    void set_row(FeatureId id, SparseRow row);

    std::int64_t total() const;

    bool operator==(const CountMatrix&) const = default;

private:
    int days_;
    std::map<FeatureId, SparseRow> rows_;
};

// Additive per-day counter. Partial accumulators built on separate threads
// can be merged; the finished matrix does not depend on insertion order.
class CountAccumulator {
public:
    explicit CountAccumulator(int days) : days_(days) {}

    void add(int day, std::span<const FeatureId> features);
    void merge(const CountAccumulator& other);
    CountMatrix finish() const;

private:
    int days_;
    std::unordered_map<FeatureId, std::map<int, std::int64_t>, FeatureIdHash> counts_;
};

CountMatrix accumulate(int days, std::span<const std::pair<int, std::vector<FeatureId>>> stream);

inline constexpr std::int64_t kDefaultMinCount = 5;

// Keeps a feature iff it reaches `threshold` on at least one day.
CountMatrix filter_min_count(const CountMatrix& m, std::int64_t threshold = kDefaultMinCount);

struct ScoredFeature {
    FeatureId id;
    std::optional<double> score;  // nullopt: undefined (e.g. zero variance)
};

struct TopK {
    CountMatrix matrix;                  // the K best rows
    std::vector<ScoredFeature> ranked;   // every feature, best first
};

// Ranks by score descending (by |score| when `absolute`), undefined scores
// last, ties by FeatureId. Keeps the rows of the first K.
TopK select_top_k(const CountMatrix& m, const GsrVector& gsr, const MetricSpec& metric, std::size_t k,
                  bool absolute = false);

// Ranking used by select_top_k, exposed for reuse on any scored list.
void rank_scores(std::vector<ScoredFeature>& scores, bool absolute = false);

} // namespace dcm
