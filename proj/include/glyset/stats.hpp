#pragma once

#include <string>
#include <vector>

namespace glyset::stats {

struct Sample {
    std::string group_id;
    std::vector<double> values;
};

// Ranks 1..N assigned jointly over the pooled values; ties share the mean
// rank. Returned in pooled input order.
std::vector<double> midranks(const std::vector<double>& pooled);

struct Correlation {
    double r;
    double p; // two-sided, t distribution with n-2 df
};

Correlation pearson_r(const std::vector<double>& x, const std::vector<double>& y);

struct PairwiseComparison {
    std::string group_a;
    std::string group_b;
    double z;
    double p;          // two-sided normal
    double adjusted_p; // after the requested adjustment, capped at 1
};

struct TestResult {
    double statistic; // H for Kruskal-Wallis
    double p_value;
    std::vector<PairwiseComparison> pairwise;
};

// Tie-corrected H with a chi-square(k-1) p-value.
TestResult kruskal_wallis(const std::vector<Sample>& groups);

enum class Adjustment { None, Bonferroni };

// Rank-mean pairwise z tests over the pooled Kruskal-Wallis ranking.
std::vector<PairwiseComparison> dunn_test(const std::vector<Sample>& groups,
                                          Adjustment adjustment = Adjustment::Bonferroni);

} // namespace glyset::stats
