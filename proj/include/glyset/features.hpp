#pragma once

#include "glyset/corpus.hpp"
#include "glyset/labels.hpp"
#include "glyset/textprep.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace glyset::features {

enum class ColumnKind : unsigned char { Count, NbWeighted, Embedding, Nutritional };

const char* to_string(ColumnKind k);

// Dense row-per-recipe matrix with per-column metadata. NbWeighted columns
// are never standardized.
struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;
    std::vector<ColumnKind> column_kinds;
    std::vector<bool> standardizable;
    std::vector<double> data; // row-major, rows() x cols()

    size_t rows() const { return row_ids.size(); }
    size_t cols() const { return column_names.size(); }
    double at(size_t r, size_t c) const { return data[r * cols() + c]; }
    double& at(size_t r, size_t c) { return data[r * cols() + c]; }

    // Throws on any NaN/infinite entry, naming the offending row and column.
    void check_finite() const;
};

// Occurrence counts over the recipe's full token stream (title, ingredients,
// directions). parsed=true swaps in the parsed ingredient tokens. UNK tokens
// contribute nothing.
std::vector<double> bow_counts(const textprep::TokenizedRecipe& tr,
                               const textprep::Vocabulary& v, bool parsed);

FeatureMatrix bow_matrix(const std::vector<textprep::TokenizedRecipe>& recipes,
                         const textprep::Vocabulary& v, bool parsed, int jobs = 1);

// Per-column naive Bayes log-count ratios, smoothing alpha = 1. Fit only
// from the given training rows.
struct NbWeights {
    std::vector<double> r;
};

NbWeights fit_nb_weights(const FeatureMatrix& counts,
                         const std::vector<size_t>& train_rows,
                         const std::vector<BinaryClass>& y);

std::vector<double> apply_nb_weights(const std::vector<double>& counts, const NbWeights& w);

// Elementwise r * count; columns renamed bow:* -> nbbow:* and marked
// non-standardizable.
FeatureMatrix apply_nb_weights(const FeatureMatrix& counts, const NbWeights& w);

struct EmbeddingTable {
    size_t dimension = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* lookup(const std::string& token) const {
        auto it = vectors.find(token);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

// Text format: one line per token, the token followed by D space-separated
// reals. A word2vec-style "count dim" first line is tolerated. Duplicate
// tokens keep the last vector (with a warning); ragged dimensions are an
// error naming the line.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Unweighted mean of the vectors of in-table tokens; all-out-of-table
// recipes get the zero vector and a warning.
std::vector<double> embed_recipe(const textprep::TokenizedRecipe& tr,
                                 const EmbeddingTable& table);

FeatureMatrix embedding_matrix(const std::vector<textprep::TokenizedRecipe>& recipes,
                               const EmbeddingTable& table, int jobs = 1);

// Nutrient keys present in every recipe of the corpus (energy keys
// excluded), sorted; the documented NU column order.
std::vector<std::string> common_nutrient_names(const std::vector<corpus::Recipe>& recipes);

// Normalized (per gram dry weight) values for the configured nutrients, in
// order, plus dry_weight as the final entry.
std::vector<double> nutritional_vector(const corpus::Recipe& r,
                                       const corpus::DerivedNutrition& d,
                                       const std::vector<std::string>& nutrient_names);

FeatureMatrix nutritional_matrix(const std::vector<corpus::Recipe>& recipes,
                                 const std::vector<corpus::DerivedNutrition>& derived,
                                 const std::vector<std::string>& nutrient_names);

// Per-column mean/stdev (population) fit on training rows only. Non-
// standardizable and constant columns pass through unchanged.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;
    std::vector<bool> active; // columns actually transformed
};

Standardizer fit_standardizer(const FeatureMatrix& x, const std::vector<size_t>& train_rows);
FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x);

// Column-wise concatenation; all inputs must share identical row ids.
FeatureMatrix concat(const std::vector<FeatureMatrix>& parts);

void write_matrix_csv(const FeatureMatrix& x, const std::filesystem::path& path);

} // namespace glyset::features
