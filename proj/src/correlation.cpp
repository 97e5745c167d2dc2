#include "dcm/correlation.hpp"

#include "dcm/error.hpp"
#include "dcm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcm {

std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::Pearson:
        return "pearson";
    case Metric::Spearman:
        return "spearman";
    case Metric::Kendall:
        return "kendall";
    case Metric::DistanceCorrelation:
        return "dcor";
    case Metric::MutualInformation:
        return "mi";
    }
    return "?";
}

Metric parse_metric(std::string_view id) {
    if (id == "pearson") return Metric::Pearson;
    if (id == "spearman") return Metric::Spearman;
    if (id == "kendall") return Metric::Kendall;
    if (id == "dcor") return Metric::DistanceCorrelation;
    if (id == "mi") return Metric::MutualInformation;
    throw Error("unknown metric '" + std::string(id) + "' (expected pearson|spearman|kendall|dcor|mi)");
}

namespace {

void check_pair(Series x, Series y) {
    if (x.size() != y.size()) {
        throw Error("series length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
    if (x.size() < 2) throw Error("correlation needs at least 2 observations");
}

double mean(Series x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

std::int64_t tied_pairs(const std::vector<double>& sorted) {
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<std::int64_t>(j - i);
        pairs += t * (t - 1) / 2;
        i = j;
    }
    return pairs;
}

// Sorts `v` and returns the number of pairs i < j with v[i] > v[j].
std::int64_t count_inversions(std::vector<double>& v) {
    std::vector<double> buf(v.size());
    std::int64_t inversions = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const auto mid = std::min(lo + width, v.size());
            const auto hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += static_cast<std::int64_t>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        v.swap(buf);
    }
    return inversions;
}

} // namespace

std::optional<double> pearson(Series x, Series y) {
    check_pair(x, y);
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> mid_ranks(Series x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

std::optional<double> spearman(Series x, Series y) {
    check_pair(x, y);
    const auto rx = mid_ranks(x);
    const auto ry = mid_ranks(y);
    return pearson(rx, ry);
}

std::optional<double> kendall_tau(Series x, Series y) {
    check_pair(x, y);
    const auto n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
    });

    const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    std::int64_t ties_x = 0, ties_xy = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && x[order[j]] == x[order[i]]) ++j;
        const auto t = static_cast<std::int64_t>(j - i);
        ties_x += t * (t - 1) / 2;
        for (std::size_t a = i; a < j;) {
            std::size_t b = a + 1;
            while (b < j && y[order[b]] == y[order[a]]) ++b;
            const auto u = static_cast<std::int64_t>(b - a);
            ties_xy += u * (u - 1) / 2;
            a = b;
        }
        i = j;
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const auto discordant = count_inversions(ys);  // ys is now sorted
    const auto ties_y = tied_pairs(ys);

    const auto s = total - ties_x - ties_y + ties_xy - 2 * discordant;
    const auto nx = total - ties_x;
    const auto ny = total - ties_y;
    if (nx == 0 || ny == 0) return std::nullopt;
    return std::clamp(static_cast<double>(s) / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny)),
                      -1.0, 1.0);
}

double distance_correlation(Series x, Series y) {
    check_pair(x, y);
    const auto n = x.size();
    const auto nd = static_cast<double>(n);
    std::vector<double> ax(n, 0.0), ay(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            ax[i] += std::fabs(x[i] - x[j]);
            ay[i] += std::fabs(y[i] - y[j]);
        }
        ax[i] /= nd;
        ay[i] /= nd;
    }
    const double gx = std::accumulate(ax.begin(), ax.end(), 0.0) / nd;
    const double gy = std::accumulate(ay.begin(), ay.end(), 0.0) / nd;

    double cov = 0, var_x = 0, var_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::fabs(x[i] - x[j]) - ax[i] - ax[j] + gx;
            const double b = std::fabs(y[i] - y[j]) - ay[i] - ay[j] + gy;
            cov += a * b;
            var_x += a * a;
            var_y += b * b;
        }
    }
    cov /= nd * nd;
    var_x /= nd * nd;
    var_y /= nd * nd;
    if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
    const double r2 = cov / std::sqrt(var_x * var_y);
    return std::sqrt(std::clamp(r2, 0.0, 1.0));
}

int equal_width_bin(double v, double lo, double hi, int bins) {
    if (hi <= lo) return 0;
    const auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

double mutual_information(Series x, Series y, int bins) {
    check_pair(x, y);
    if (bins < 2) throw Error("mutual information needs at least 2 bins");
    const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
    const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<std::int64_t> joint(nb * nb, 0), px(nb, 0), py(nb, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto a = static_cast<std::size_t>(equal_width_bin(x[i], *xlo, *xhi, bins));
        const auto b = static_cast<std::size_t>(equal_width_bin(y[i], *ylo, *yhi, bins));
        ++joint[a * nb + b];
        ++px[a];
        ++py[b];
    }
    const auto n = static_cast<double>(x.size());
    double mi = 0.0;
    for (std::size_t a = 0; a < nb; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            const auto c = joint[a * nb + b];
            if (c == 0) continue;
            const double p = static_cast<double>(c) / n;
            const double pa = static_cast<double>(px[a]) / n;
            const double pb = static_cast<double>(py[b]) / n;
            mi += p * std::log2(p / (pa * pb));
        }
    }
    return std::max(0.0, mi);
}

std::optional<double> score(Series x, Series y, const MetricSpec& metric) {
    switch (metric.metric) {
    case Metric::Pearson:
        return pearson(x, y);
    case Metric::Spearman:
        return spearman(x, y);
    case Metric::Kendall:
        return kendall_tau(x, y);
    case Metric::DistanceCorrelation:
        return distance_correlation(x, y);
    case Metric::MutualInformation:
        return mutual_information(x, y, metric.mi_bins);
    }
    return std::nullopt;
}

std::vector<double> to_series(std::span<const std::int64_t> counts) {
    return {counts.begin(), counts.end()};
}

std::vector<std::optional<double>> correlate_matrix(const CountMatrix& m, const GsrVector& gsr,
                                                    const MetricSpec& metric) {
    if (static_cast<std::size_t>(m.days()) != gsr.counts.size()) {
        throw Error("count matrix spans " + std::to_string(m.days()) + " days but GSR has " +
                    std::to_string(gsr.counts.size()));
    }
    std::vector<const SparseRow*> rows;
    rows.reserve(m.size());
    for (const auto& [id, row] : m.rows()) rows.push_back(&row);

    const auto target = to_series(gsr.counts);
    std::vector<std::optional<double>> out(rows.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const auto dense = to_series(rows[i]->dense(m.days()));
        out[i] = score(dense, target, metric);
    });
    return out;
}

} // namespace dcm
