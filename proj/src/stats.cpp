#include "glyset/stats.hpp"

#include "glyset/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace glyset::stats {

std::vector<double> midranks(const std::vector<double>& pooled) {
    const size_t n = pooled.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

struct Ranked {
    std::vector<double> pooled;
    std::vector<double> ranks;
    std::vector<double> mean_rank; // per group
    std::vector<size_t> sizes;     // per group
    double tie_cubes;              // sum of t^3 - t over tie groups
    size_t n;
};

Ranked rank_groups(const std::vector<Sample>& groups) {
    if (groups.size() < 2) throw Error("need at least two groups");
    Ranked rk;
    for (const auto& g : groups) {
        if (g.values.empty()) throw Error("empty group: " + g.group_id);
        rk.pooled.insert(rk.pooled.end(), g.values.begin(), g.values.end());
        rk.sizes.push_back(g.values.size());
    }
    rk.n = rk.pooled.size();
    bool all_same = std::all_of(rk.pooled.begin(), rk.pooled.end(),
                                [&](double v) { return v == rk.pooled[0]; });
    if (all_same) throw Error("degenerate ranks: all values identical");

    rk.ranks = midranks(rk.pooled);

    size_t pos = 0;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        double s = 0.0;
        for (size_t k = 0; k < rk.sizes[gi]; ++k) s += rk.ranks[pos + k];
        rk.mean_rank.push_back(s / static_cast<double>(rk.sizes[gi]));
        pos += rk.sizes[gi];
    }

    std::vector<double> sorted = rk.pooled;
    std::sort(sorted.begin(), sorted.end());
    rk.tie_cubes = 0.0;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        rk.tie_cubes += t * t * t - t;
        i = j + 1;
    }
    return rk;
}

} // namespace

Correlation pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("pearson_r: length mismatch");
    const size_t n = x.size();
    if (n < 3) throw Error("pearson_r: need at least three points");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("constant input");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    double df = static_cast<double>(n - 2);
    double p;
    if (std::abs(r) >= 1.0) {
        p = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        boost::math::students_t dist(df);
        p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    return {r, p};
}

TestResult kruskal_wallis(const std::vector<Sample>& groups) {
    Ranked rk = rank_groups(groups);
    const double N = static_cast<double>(rk.n);
    if (rk.n < 5) throw Error("kruskal_wallis: need at least five observations");

    double h = 0.0;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        double d = rk.mean_rank[gi] - (N + 1.0) / 2.0;
        h += static_cast<double>(rk.sizes[gi]) * d * d;
    }
    h *= 12.0 / (N * (N + 1.0));
    double correction = 1.0 - rk.tie_cubes / (N * N * N - N);
    h /= correction;

    boost::math::chi_squared dist(static_cast<double>(groups.size() - 1));
    double p = boost::math::cdf(boost::math::complement(dist, h));
    return {h, p, {}};
}

std::vector<PairwiseComparison> dunn_test(const std::vector<Sample>& groups,
                                          Adjustment adjustment) {
    Ranked rk = rank_groups(groups);
    const double N = static_cast<double>(rk.n);
    if (rk.n < 5) throw Error("dunn_test: need at least five observations");

    double tie_term = rk.tie_cubes / (12.0 * (N - 1.0));
    double base_var = N * (N + 1.0) / 12.0 - tie_term;
    size_t k = groups.size();
    double n_pairs = static_cast<double>(k * (k - 1) / 2);
    boost::math::normal norm;

    std::vector<PairwiseComparison> out;
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            double se = std::sqrt(base_var * (1.0 / static_cast<double>(rk.sizes[i]) +
                                              1.0 / static_cast<double>(rk.sizes[j])));
            double z = (rk.mean_rank[i] - rk.mean_rank[j]) / se;
            double p = 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(z)));
            double adj = p;
            if (adjustment == Adjustment::Bonferroni) adj = std::min(1.0, p * n_pairs);
            out.push_back({groups[i].group_id, groups[j].group_id, z, p, adj});
        }
    }
    return out;
}

} // namespace glyset::stats
