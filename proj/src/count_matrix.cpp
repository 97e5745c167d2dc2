#include "dcm/count_matrix.hpp"

#include "dcm/correlation.hpp"
#include "dcm/error.hpp"

#include <algorithm>
#include <cmath>

namespace dcm {

std::int64_t SparseRow::max() const {
    std::int64_t best = 0;
    for (const auto& [day, c] : entries) best = std::max(best, c);
    return best;
}

std::int64_t SparseRow::total() const {
    std::int64_t sum = 0;
    for (const auto& [day, c] : entries) sum += c;
    return sum;
}

DailyCounts SparseRow::dense(int days) const {
    DailyCounts out(static_cast<std::size_t>(days), 0);
    for (const auto& [day, c] : entries) out[static_cast<std::size_t>(day)] = c;
    return out;
}

SparseRow SparseRow::from_dense(std::span<const std::int64_t> counts) {
    SparseRow row;
    for (std::size_t d = 0; d < counts.size(); ++d) {
        if (counts[d] != 0) row.entries.emplace_back(static_cast<int>(d), counts[d]);
    }
    return row;
}

const SparseRow& CountMatrix::row(const FeatureId& id) const {
    const auto it = rows_.find(id);
    if (it == rows_.end()) throw Error("feature " + id.str() + " not in count matrix");
    return it->second;
}

void CountMatrix::set_row(FeatureId id, std::span<const std::int64_t> counts) {
    if (counts.size() != static_cast<std::size_t>(days_)) {
        throw Error("row " + id.str() + " has " + std::to_string(counts.size()) + " days, matrix has " +
                    std::to_string(days_));
    }
    if (std::any_of(counts.begin(), counts.end(), [](std::int64_t c) { return c < 0; })) {
        throw Error("row " + id.str() + " has a negative count");
    }
    rows_[std::move(id)] = SparseRow::from_dense(counts);
}

void CountMatrix::set_row(FeatureId id, SparseRow row) {
    for (const auto& [day, c] : row.entries) {
        if (day < 0 || day >= days_ || c < 0) throw Error("row " + id.str() + " has an invalid entry");
    }
    rows_[std::move(id)] = std::move(row);
}

std::int64_t CountMatrix::total() const {
    std::int64_t sum = 0;
    for (const auto& [id, row] : rows_) sum += row.total();
    return sum;
}

void CountAccumulator::add(int day, std::span<const FeatureId> features) {
    if (day < 0 || day >= days_) {
        throw Error("day ordinal " + std::to_string(day) + " outside timeframe of " + std::to_string(days_) +
                    " days");
    }
    for (const auto& f : features) ++counts_[f][day];
}

void CountAccumulator::merge(const CountAccumulator& other) {
    if (other.days_ != days_) throw Error("cannot merge accumulators over different timeframes");
    for (const auto& [id, days] : other.counts_) {
        auto& mine = counts_[id];
        for (const auto& [day, c] : days) mine[day] += c;
    }
}

CountMatrix CountAccumulator::finish() const {
    CountMatrix m(days_);
    for (const auto& [id, days] : counts_) {
        SparseRow row;
        row.entries.assign(days.begin(), days.end());
        m.set_row(id, std::move(row));
    }
    return m;
}

CountMatrix accumulate(int days, std::span<const std::pair<int, std::vector<FeatureId>>> stream) {
    CountAccumulator acc(days);
    for (const auto& [day, features] : stream) acc.add(day, features);
    return acc.finish();
}

CountMatrix filter_min_count(const CountMatrix& m, std::int64_t threshold) {
    if (threshold < 0) throw Error("min-count threshold must be >= 0");
    CountMatrix out(m.days());
    for (const auto& [id, row] : m.rows()) {
        // An all-zero row never survives, even at threshold 0.
        if (!row.entries.empty() && row.max() >= threshold) out.set_row(id, row);
    }
    return out;
}

void rank_scores(std::vector<ScoredFeature>& scores, bool absolute) {
    const auto key = [absolute](const ScoredFeature& s) {
        return absolute ? std::fabs(*s.score) : *s.score;
    };
    std::sort(scores.begin(), scores.end(), [&](const ScoredFeature& a, const ScoredFeature& b) {
        if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
        if (a.score && b.score) {
            const auto ka = key(a);
            const auto kb = key(b);
            if (ka != kb) return ka > kb;
        }
        return a.id < b.id;
    });
}

TopK select_top_k(const CountMatrix& m, const GsrVector& gsr, const MetricSpec& metric, std::size_t k,
                  bool absolute) {
    if (k < 1) throw Error("top-K requires K >= 1");
    const auto scores = correlate_matrix(m, gsr, metric);
    std::vector<ScoredFeature> ranked;
    ranked.reserve(m.size());
    std::size_t i = 0;
    for (const auto& [id, row] : m.rows()) ranked.push_back({id, scores[i++]});
    rank_scores(ranked, absolute);

    TopK out{CountMatrix(m.days()), std::move(ranked)};
    for (std::size_t j = 0; j < std::min(k, out.ranked.size()); ++j) {
        out.matrix.set_row(out.ranked[j].id, m.row(out.ranked[j].id));
    }
    return out;
}

} // namespace dcm
