#pragma once

#include "glyset/corpus.hpp"
#include "glyset/eval.hpp"
#include "glyset/features.hpp"
#include "glyset/labels.hpp"
#include "glyset/textprep.hpp"

#include <string>
#include <vector>

namespace glyset::variants {

// Feature-set names accepted by make(): bow-basic, bow-parsed, nb-bow,
// embedding, nu, nu+nb-bow, nu+embedding.
const std::vector<std::string>& valid_names();

// Shared, label-independent artifacts (vocabularies, raw count/embedding/
// nutrient matrices) built once per corpus. The per-fold builders returned
// by make() fit NB weights and standardizers from their training rows only,
// then standardize each block before concatenation.
class VariantContext {
  public:
    VariantContext(const std::vector<corpus::Recipe>& recipes,
                   const std::vector<BinaryClass>& labels,
                   const std::vector<std::string>& stoplist,
                   const features::EmbeddingTable* embeddings, int min_count = 5,
                   int jobs = 1);

    // Throws on an unknown name, listing the valid ones; requesting an
    // embedding variant without an embedding table is an error too.
    eval::VariantSpec make(const std::string& name) const;
    std::vector<eval::VariantSpec> make_all(const std::vector<std::string>& names) const;

    const textprep::Vocabulary& vocab_basic() const { return vocab_basic_; }
    const textprep::Vocabulary& vocab_parsed() const { return vocab_parsed_; }
    const features::FeatureMatrix& counts_basic() const { return counts_basic_; }
    const features::FeatureMatrix& counts_parsed() const { return counts_parsed_; }
    const features::FeatureMatrix& nutritional() const { return nutritional_; }
    const std::vector<std::string>& nutrient_names() const { return nutrient_names_; }
    const std::vector<BinaryClass>& labels() const { return labels_; }

  private:
    std::vector<BinaryClass> labels_;
    std::vector<std::string> nutrient_names_;
    textprep::Vocabulary vocab_basic_;
    textprep::Vocabulary vocab_parsed_;
    features::FeatureMatrix counts_basic_;
    features::FeatureMatrix counts_parsed_;
    features::FeatureMatrix nutritional_;
    features::FeatureMatrix embedding_;
    bool has_embeddings_ = false;
};

} // namespace glyset::variants
