#pragma once

#include "glyset/classifier.hpp"
#include "glyset/features.hpp"
#include "glyset/labels.hpp"
#include "glyset/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace glyset::eval {

struct Fold {
    std::vector<size_t> train; // row indices, sorted
    std::vector<size_t> test;
};

// Stratified nested cross-validation plan. Outer test sets partition the
// rows; inner folds are nested inside each outer training set.
struct FoldPlan {
    uint64_t seed = 0;
    std::vector<Fold> outer;
    std::vector<std::vector<Fold>> inner; // [outer fold][inner fold]
};

// Per-class shuffle (seeded) + round-robin deal, so every fold's class
// counts are within one of proportional.
FoldPlan make_fold_plan(const std::vector<BinaryClass>& labels, uint64_t seed,
                        int outer_folds = 5, int inner_folds = 5);

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// UD is the positive class; zero denominators score 0.
Metrics compute_metrics(const std::vector<BinaryClass>& truth,
                        const std::vector<BinaryClass>& pred);
Metrics metrics_at_threshold(const std::vector<double>& probs,
                             const std::vector<BinaryClass>& truth, double threshold);

// Builds the full feature matrix for one variant, fitting every
// label-dependent artifact (NB weights, standardizer) from the given
// training rows only.
using FeatureBuilder =
    std::function<features::FeatureMatrix(const std::vector<size_t>& train_rows)>;

struct VariantSpec {
    std::string name;
    FeatureBuilder builder;
};

struct GridPoint {
    double c = 1.0;
    double threshold = 0.5;
    double mean_f1 = 0.0;
};

// Mean F1 across folds at each threshold for one C, from per-fold
// (validation probabilities, validation truth) pairs.
std::vector<GridPoint> score_threshold_grid(
    double c,
    const std::vector<std::pair<std::vector<double>, std::vector<BinaryClass>>>& fold_outputs,
    const std::vector<double>& threshold_grid);

// Highest mean F1; ties prefer smaller C, then threshold nearest 0.50,
// then the smaller threshold.
GridPoint select_grid_point(const std::vector<GridPoint>& points);

struct GridSearchResult {
    double c = 1.0;
    double threshold = 0.5;
    std::vector<GridPoint> evaluated; // every (C, threshold) pair scored
};

GridSearchResult grid_search(const FeatureBuilder& builder,
                             const std::vector<BinaryClass>& labels,
                             const std::vector<Fold>& inner_folds,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& threshold_grid,
                             const classifier::LrOptions& opts = {});

struct FoldResult {
    int fold = 0;
    Metrics metrics;
    double c = 1.0;
    double threshold = 0.5;
    classifier::TrainedClassifier model;
};

struct VariantResult {
    std::string name;
    std::vector<FoldResult> folds;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    std::string error; // nonempty: variant aborted, folds incomplete
};

struct VariantComparison {
    double kw_statistic = 0.0;
    double kw_p = 1.0;
    std::string best_variant;
    std::vector<stats::PairwiseComparison> pairwise; // best variant vs each other
    std::vector<std::string> flagged;                // "a vs b" at adjusted p < alpha
    std::string note; // set when the comparison is skipped or degenerate
};

struct EvalReport {
    std::vector<VariantResult> variants;
    VariantComparison significance;
};

// Per outer fold: grid-search the inner folds, refit the outer training
// set at the winner, score the outer test set. A fold failure aborts its
// variant (reason recorded); other variants continue.
EvalReport run_nested_cv(const std::vector<VariantSpec>& variants,
                         const std::vector<BinaryClass>& labels, const FoldPlan& plan,
                         const std::vector<double>& c_grid,
                         const std::vector<double>& threshold_grid,
                         const classifier::LrOptions& opts = {}, int jobs = 1);

// Kruskal-Wallis over per-fold F1 grouped by variant, then Dunn's test of
// the best-mean variant against each other (Bonferroni over those
// comparisons). Degenerate data yields a note instead of an error.
VariantComparison compare_variants(const EvalReport& report, double alpha = 0.05);

// variant,fold,precision,recall,F1,C,threshold — one row per completed fold.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);

} // namespace glyset::eval
