#pragma once

#include "glyset/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace glyset::textprep {

// Default quantity/unit stop-list used by parse_ingredients. Overridable
// via a plain-text file (one word per line).
const std::vector<std::string>& default_quantity_stoplist();
std::vector<std::string> load_stoplist(const std::filesystem::path& path);

// Lowercase, replace ASCII punctuation by a space, split on whitespace.
// Numerals survive; bytes >= 0x80 pass through untouched.
std::vector<std::string> tokenize_text(const std::string& text);

// Strip numerals (integers, decimals, fractions, unicode vulgar
// fractions), stop-listed quantity words, and parenthesized comments from
// ingredient lines. Surviving text keeps its original order and casing.
std::vector<std::string> parse_ingredients(const std::vector<std::string>& lines,
                                           const std::vector<std::string>& stoplist);

struct TokenizedRecipe {
    std::string id;
    std::vector<std::string> tokens_title;
    std::vector<std::string> tokens_ingredients;        // raw ingredient lines
    std::vector<std::string> tokens_ingredients_parsed; // after parse_ingredients
    std::vector<std::string> tokens_directions;

    // Title, ingredients (raw or parsed), directions — in that order.
    std::vector<std::string> all_tokens(bool parsed = false) const;
};

TokenizedRecipe tokenize(const corpus::Recipe& r, const std::vector<std::string>& stoplist);
inline TokenizedRecipe tokenize(const corpus::Recipe& r) {
    return tokenize(r, default_quantity_stoplist());
}

struct Vocabulary {
    int min_count = 5;
    std::unordered_map<std::string, int> index; // token -> dense feature index
    std::vector<std::string> tokens;            // index -> token
    std::vector<int64_t> counts;                // index -> corpus count

    size_t size() const { return tokens.size(); }
    std::optional<int> lookup(const std::string& token) const {
        auto it = index.find(token);
        if (it == index.end()) return std::nullopt; // UNK: no feature index
        return it->second;
    }
};

// Tokens with corpus count >= min_count get dense indices in
// (count desc, token asc) order; everything else maps to UNK.
Vocabulary build_vocabulary(const std::vector<TokenizedRecipe>& corpus,
                            int min_count = 5, bool parsed = false);

void write_vocabulary_csv(const Vocabulary& v, const std::filesystem::path& path);

} // namespace glyset::textprep
