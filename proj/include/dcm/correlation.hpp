#pragma once

#include "dcm/corpus_ingest.hpp"
#include "dcm/count_matrix.hpp"
#include "dcm/metric.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dcm {

using Series = std::span<const double>;

// All measures require |x| == |y| >= 2 and throw dcm::Error otherwise.
// Rank measures return nullopt when a score is undefined (zero variance or
// all values tied in either argument).

std::optional<double> pearson(Series x, Series y);

// Pearson on mid-ranks (ties share the average of their ranks).
std::optional<double> spearman(Series x, Series y);

// Kendall tau-b, O(n log n) via merge-sort inversion counting.
std::optional<double> kendall_tau(Series x, Series y);

// Biased (V-statistic) distance correlation in [0, 1]; 0 if either input is constant.
double distance_correlation(Series x, Series y);

// Equal-width histogram estimate in bits. Each series is binned over its own
// [min, max]; a constant series falls into one bin. Clamped at 0.
double mutual_information(Series x, Series y, int bins = kDefaultMiBins);

// 1-based ranks with ties averaged.
std::vector<double> mid_ranks(Series x);

// Equal-width bin index used by mutual_information.
int equal_width_bin(double v, double lo, double hi, int bins);

std::optional<double> score(Series x, Series y, const MetricSpec& metric);

std::vector<double> to_series(std::span<const std::int64_t> counts);

// Element i scores the i-th row (FeatureId order) against the GSR.
// Distance correlation and MI never come back undefined.
std::vector<std::optional<double>> correlate_matrix(const CountMatrix& m, const GsrVector& gsr,
                                                    const MetricSpec& metric);

} // namespace dcm
