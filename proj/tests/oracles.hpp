#pragma once

// Direct, definitional implementations used to check the fast library code.
// Deliberately naive: O(n^2) pair loops, materialized matrices, explicit maps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace dcm::oracle {

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<long double>(x.size());
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Rank = (# smaller) + (# equal + 1) / 2.
inline std::vector<double> mid_ranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (double v : x) {
            if (v < x[i]) ++less;
            if (v == x[i]) ++equal;
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(mid_ranks(x), mid_ranks(y));
}

// tau-b by enumerating every pair.
inline std::optional<double> kendall(const std::vector<double>& x, const std::vector<double>& y) {
    std::int64_t concordant = 0, discordant = 0, tie_x = 0, tie_y = 0, pairs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            ++pairs;
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0) ++tie_x;
            if (dy == 0) ++tie_y;
            if (dx * dy > 0) ++concordant;
            if (dx * dy < 0) ++discordant;
        }
    }
    const auto nx = pairs - tie_x, ny = pairs - tie_y;
    if (nx == 0 || ny == 0) return std::nullopt;
    return static_cast<double>(concordant - discordant) / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
}

inline std::vector<std::vector<double>> double_centered(const std::vector<double>& x) {
    const auto n = x.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = std::abs(x[i] - x[j]);
    std::vector<double> row(n, 0), col(n, 0);
    double grand = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            row[i] += a[i][j] / n;
            col[j] += a[i][j] / n;
            grand += a[i][j] / (double(n) * n);
        }
    auto out = a;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = a[i][j] - row[i] - col[j] + grand;
    return out;
}

inline double dcor(const std::vector<double>& x, const std::vector<double>& y) {
    const auto A = double_centered(x), B = double_centered(y);
    const auto n = x.size();
    long double v_xy = 0, v_xx = 0, v_yy = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            v_xy += A[i][j] * B[i][j];
            v_xx += A[i][j] * A[i][j];
            v_yy += B[i][j] * B[i][j];
        }
    const long double nn = static_cast<long double>(n) * n;
    v_xy /= nn;
    v_xx /= nn;
    v_yy /= nn;
    if (v_xx <= 1e-300 || v_yy <= 1e-300) return 0.0;
    return static_cast<double>(std::sqrt(std::max<long double>(0, v_xy / std::sqrt(v_xx * v_yy))));
}

// Joint histogram over equal-width bins spanning each series' own range.
inline double mutual_information(const std::vector<double>& x, const std::vector<double>& y, int bins) {
    auto bin_of = [bins](const std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        std::vector<int> out;
        for (double e : v) {
            int b = hi > lo ? static_cast<int>(std::floor((e - lo) / (hi - lo) * bins)) : 0;
            out.push_back(std::min(std::max(b, 0), bins - 1));
        }
        return out;
    };
    const auto bx = bin_of(x), by = bin_of(y);
    std::map<std::pair<int, int>, int> joint;
    std::map<int, int> mx, my;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++joint[{bx[i], by[i]}];
        ++mx[bx[i]];
        ++my[by[i]];
    }
    const double n = static_cast<double>(x.size());
    double mi = 0;
    for (const auto& [cell, c] : joint) {
        const double p = c / n;
        mi += p * std::log2(p / ((mx[cell.first] / n) * (my[cell.second] / n)));
    }
    return std::max(0.0, mi);
}

} // namespace dcm::oracle
