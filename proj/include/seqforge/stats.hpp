#pragma once

// Small descriptive and rank statistics used by run comparisons.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "seqforge/error.hpp"

namespace seqforge::stats {

/// Linear-interpolation quantile (the "type 7" definition), q in [0,1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::span<const double> values) {
    return quantile(std::vector<double>(values.begin(), values.end()), 0.5);
}

inline double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr() const noexcept { return q3 - q1; }
};

inline Summary summarize(std::span<const double> values) {
    Summary s;
    s.n = values.size();
    if (values.empty()) return s;
    std::vector<double> v(values.begin(), values.end());
    s.mean = stats::mean(values);
    s.median = quantile(v, 0.5);
    s.q1 = quantile(v, 0.25);
    s.q3 = quantile(v, 0.75);
    return s;
}

struct MannWhitneyResult {
    double u = 0.0;        // U statistic of the first sample
    double p_value = 1.0;  // one-sided: first sample stochastically greater
    bool exact = false;
};

namespace detail {

// Number of orderings of m x-values and n y-values with U_x == u, for all u.
inline std::vector<double> mann_whitney_counts(std::size_t m, std::size_t n) {
    // table[i][j] holds the distribution for i x-values and j y-values.
    std::vector<std::vector<std::vector<double>>> table(
        m + 1, std::vector<std::vector<double>>(n + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            auto& cur = table[i][j];
            cur.assign(i * j + 1, 0.0);
            if (i == 0 || j == 0) {
                cur[0] = 1.0;
                continue;
            }
            // Largest value is an x (beats all j y-values) or a y.
            const auto& with_x = table[i - 1][j];
            for (std::size_t u = 0; u < with_x.size(); ++u) cur[u + j] += with_x[u];
            const auto& with_y = table[i][j - 1];
            for (std::size_t u = 0; u < with_y.size(); ++u) cur[u] += with_y[u];
        }
    }
    return table[m][n];
}

}  // namespace detail

/// One-sided Mann-Whitney U test of H1: x tends to be larger than y.
/// Exact null distribution without ties for samples up to 50; otherwise the
/// normal approximation with tie and continuity correction.
inline MannWhitneyResult mann_whitney_greater(std::span<const double> x, std::span<const double> y) {
    const std::size_t m = x.size(), n = y.size();
    if (m == 0 || n == 0) throw Error("mann_whitney on empty sample");
    std::vector<std::pair<double, int>> all;
    for (double v : x) all.push_back({v, 0});
    for (double v : y) all.push_back({v, 1});
    std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.first < b.first; });
    double rank_sum_x = 0.0, tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const auto t = static_cast<double>(j - i);
        if (j - i > 1) ties = true;
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0) rank_sum_x += mid;
        i = j;
    }
    MannWhitneyResult r;
    const double md = static_cast<double>(m), nd = static_cast<double>(n);
    r.u = rank_sum_x - md * (md + 1.0) / 2.0;
    if (!ties && m <= 50 && n <= 50) {
        const auto counts = detail::mann_whitney_counts(m, n);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const auto u_obs = static_cast<std::size_t>(std::llround(r.u));
        double tail = 0.0;
        for (std::size_t u = u_obs; u < counts.size(); ++u) tail += counts[u];
        r.p_value = tail / total;
        r.exact = true;
        return r;
    }
    const double mu = md * nd / 2.0;
    const double nn = md + nd;
    const double var = md * nd / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double z = (r.u - mu - 0.5) / std::sqrt(var);
    r.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    return r;
}

}  // namespace seqforge::stats
