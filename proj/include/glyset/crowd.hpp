#pragma once

#include "glyset/labels.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace glyset::crowd {

// Ratings are the 5-point scale where higher = healthier; 6 encodes the
// "not sure" response. Binarization: rating <= 3 -> UD, >= 4 -> HD.
inline constexpr int kNotSure = 6;
inline constexpr int kNumClasses = 6; // ratings 1..5 plus not-sure

struct Judgment {
    std::string worker_id;
    std::string recipe_id;
    int rating; // 1..5 or kNotSure
};

// Validated collection: at most one judgment per (worker, recipe).
class JudgmentSet {
public:
    static JudgmentSet build(std::vector<Judgment> judgments);

    const std::vector<Judgment>& judgments() const { return judgments_; }
    const std::vector<std::string>& recipe_ids() const { return recipe_ids_; } // sorted
    const std::vector<std::string>& worker_ids() const { return worker_ids_; } // sorted

    // Judgment indices per recipe, aligned with recipe_ids().
    const std::vector<std::vector<size_t>>& by_recipe() const { return by_recipe_; }

private:
    std::vector<Judgment> judgments_;
    std::vector<std::string> recipe_ids_;
    std::vector<std::string> worker_ids_;
    std::vector<std::vector<size_t>> by_recipe_;
};

JudgmentSet load_judgments_csv(const std::filesystem::path& path);

enum class AlphaMetric { Ordinal, Interval };

// Chance-corrected agreement over the coincidence matrix; not-sure
// responses are treated as missing data.
double krippendorff_alpha(const JudgmentSet& js, AlphaMetric metric);

struct AggregatedLabel {
    std::string recipe_id;
    int label; // argmax of posterior: 1..5 or kNotSure
    std::array<double, kNumClasses> posterior;
};

struct DawidSkeneOptions {
    int max_iters = 100;
    double tol = 1e-6;
    double smoothing = 0.01; // additive smoothing on confusion counts
};

struct DawidSkeneResult {
    std::vector<AggregatedLabel> labels; // ordered by recipe id
    std::map<std::string, std::array<std::array<double, kNumClasses>, kNumClasses>>
        worker_confusion; // row c = true class, column o = observed response
    std::array<double, kNumClasses> class_priors;
    // EM objective per iteration: data log-likelihood plus the Dirichlet
    // smoothing term. Non-decreasing by construction.
    std::vector<double> objective_trace;
    std::vector<double> loglik_trace; // plain data log-likelihood
    int iterations = 0;
    bool converged = false;
};

DawidSkeneResult dawid_skene(const JudgmentSet& js, const DawidSkeneOptions& opts = {});

struct BinaryLabel {
    std::string recipe_id;
    BinaryClass cls;
};

struct BinarizeResult {
    std::vector<BinaryLabel> labels;
    size_t excluded = 0; // not-sure recipes dropped
};

BinarizeResult binarize(const std::vector<AggregatedLabel>& labels);

void write_aggregated_csv(const std::vector<AggregatedLabel>& labels,
                          const std::filesystem::path& path);
std::vector<AggregatedLabel> load_aggregated_csv(const std::filesystem::path& path);

void write_binary_labels_csv(const std::vector<BinaryLabel>& labels,
                             const std::filesystem::path& path);
std::vector<BinaryLabel> load_binary_labels_csv(const std::filesystem::path& path);

} // namespace glyset::crowd
