#include "glyset/variants.hpp"

#include "glyset/errors.hpp"

#include <algorithm>

namespace glyset::variants {

const std::vector<std::string>& valid_names() {
    static const std::vector<std::string> names = {
        "bow-basic", "bow-parsed", "nb-bow", "embedding", "nu", "nu+nb-bow", "nu+embedding"};
    return names;
}

VariantContext::VariantContext(const std::vector<corpus::Recipe>& recipes,
                               const std::vector<BinaryClass>& labels,
                               const std::vector<std::string>& stoplist,
                               const features::EmbeddingTable* embeddings, int min_count,
                               int jobs)
    : labels_(labels) {
    if (recipes.size() != labels.size()) throw Error("VariantContext: label count mismatch");
    if (recipes.empty()) throw Error("VariantContext: empty corpus");

    std::vector<textprep::TokenizedRecipe> tokenized;
    tokenized.reserve(recipes.size());
    std::vector<corpus::DerivedNutrition> derived;
    derived.reserve(recipes.size());
    for (const auto& r : recipes) {
        tokenized.push_back(textprep::tokenize(r, stoplist));
        derived.push_back(corpus::derive_nutrition(r));
    }

    vocab_basic_ = textprep::build_vocabulary(tokenized, min_count, /*parsed=*/false);
    vocab_parsed_ = textprep::build_vocabulary(tokenized, min_count, /*parsed=*/true);
    counts_basic_ = features::bow_matrix(tokenized, vocab_basic_, /*parsed=*/false, jobs);
    counts_parsed_ = features::bow_matrix(tokenized, vocab_parsed_, /*parsed=*/true, jobs);

    nutrient_names_ = features::common_nutrient_names(recipes);
    nutritional_ = features::nutritional_matrix(recipes, derived, nutrient_names_);

    if (embeddings) {
        embedding_ = features::embedding_matrix(tokenized, *embeddings, jobs);
        has_embeddings_ = true;
    }
}

namespace {

features::FeatureMatrix standardized(const features::FeatureMatrix& x,
                                     const std::vector<size_t>& train_rows) {
    return features::apply_standardizer(features::fit_standardizer(x, train_rows), x);
}

} // namespace

eval::VariantSpec VariantContext::make(const std::string& name) const {
    // Builders capture this context by pointer; it must outlive them.
    const VariantContext* ctx = this;
    if (name == "bow-basic") {
        return {name, [ctx](const std::vector<size_t>& train) {
                    return standardized(ctx->counts_basic_, train);
                }};
    }
    if (name == "bow-parsed") {
        return {name, [ctx](const std::vector<size_t>& train) {
                    return standardized(ctx->counts_parsed_, train);
                }};
    }
    if (name == "nb-bow") {
        // Same unigram counts as bow-basic, reweighted by per-fold naive
        // Bayes log-count ratios; never standardized.
        return {name, [ctx](const std::vector<size_t>& train) {
                    auto w = features::fit_nb_weights(ctx->counts_basic_, train, ctx->labels_);
                    return features::apply_nb_weights(ctx->counts_basic_, w);
                }};
    }
    if (name == "embedding") {
        if (!has_embeddings_) throw Error("variant embedding requires an embedding file");
        return {name, [ctx](const std::vector<size_t>& train) {
                    return standardized(ctx->embedding_, train);
                }};
    }
    if (name == "nu") {
        return {name, [ctx](const std::vector<size_t>& train) {
                    return standardized(ctx->nutritional_, train);
                }};
    }
    if (name == "nu+nb-bow") {
        return {name, [ctx](const std::vector<size_t>& train) {
                    auto w = features::fit_nb_weights(ctx->counts_basic_, train, ctx->labels_);
                    return features::concat({standardized(ctx->nutritional_, train),
                                             features::apply_nb_weights(ctx->counts_basic_, w)});
                }};
    }
    if (name == "nu+embedding") {
        if (!has_embeddings_) throw Error("variant nu+embedding requires an embedding file");
        return {name, [ctx](const std::vector<size_t>& train) {
                    return features::concat({standardized(ctx->nutritional_, train),
                                             standardized(ctx->embedding_, train)});
                }};
    }
    std::string valid;
    for (const auto& n : valid_names()) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw Error("unknown variant: " + name + " (valid: " + valid + ")");
}

std::vector<eval::VariantSpec> VariantContext::make_all(
    const std::vector<std::string>& names) const {
    std::vector<eval::VariantSpec> specs;
    specs.reserve(names.size());
    for (const auto& n : names) specs.push_back(make(n));
    return specs;
}

} // namespace glyset::variants
