#pragma once

#include "glyset/features.hpp"
#include "glyset/labels.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace glyset::classifier {

struct TrainedClassifier {
    std::vector<double> weights; // one per feature column
    double bias = 0.0;
    double C = 1.0;
    double threshold = 0.5; // decision boundary on the UD probability
    std::string feature_set;
    int fold = -1;
    std::vector<std::string> columns;
};

struct LrOptions {
    double tol = 1e-6; // gradient infinity-norm
    int max_iters = 1000;
};

// Penalized log-loss 0.5*||w||^2 + C * sum log(1+exp(-y(w.x+b))) over the
// given rows, with UD mapped to +1. The bias is unregularized.
double lr_objective(const features::FeatureMatrix& x, const std::vector<size_t>& rows,
                    const std::vector<BinaryClass>& y, double c,
                    const std::vector<double>& w, double b);

void lr_gradient(const features::FeatureMatrix& x, const std::vector<size_t>& rows,
                 const std::vector<BinaryClass>& y, double c,
                 const std::vector<double>& w, double b,
                 std::vector<double>& grad_w, double& grad_b);

// Deterministic L-BFGS from w = 0; converged when the gradient
// infinity-norm drops below tol (or max_iters).
TrainedClassifier train_lr(const features::FeatureMatrix& x,
                           const std::vector<size_t>& train_rows,
                           const std::vector<BinaryClass>& y, double c,
                           const LrOptions& opts = {});

std::vector<double> predict_proba(const TrainedClassifier& m,
                                  const features::FeatureMatrix& x);

// UD iff probability >= threshold.
std::vector<BinaryClass> predict(const TrainedClassifier& m,
                                 const features::FeatureMatrix& x);

// JSON round-trip: {weights, bias, C, threshold, columns}.
void save_model(const TrainedClassifier& m, const std::filesystem::path& path);
TrainedClassifier load_model(const std::filesystem::path& path);

} // namespace glyset::classifier
