#pragma once

#include <string_view>

namespace dcm {

enum class Metric { Pearson, Spearman, Kendall, DistanceCorrelation, MutualInformation };

inline constexpr int kDefaultMiBins = 16;

struct MetricSpec {
    Metric metric = Metric::Pearson;
    int mi_bins = kDefaultMiBins;  // only used by MutualInformation
};

// CLI ids: pearson|spearman|kendall|dcor|mi
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view id);

} // namespace dcm
