#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace glyset::corpus {

// Required keys of Recipe::nutrients. Amounts are grams except the energy
// keys below, which are kcal and excluded from dry weight.
extern const std::vector<std::string> kRequiredNutrients;
bool is_energy_key(const std::string& name);

struct Recipe {
    std::string id;
    std::string title;
    std::vector<std::string> ingredients;
    std::vector<std::string> directions;
    std::map<std::string, double> nutrients;
    std::set<std::string> category_tags;

    bool operator==(const Recipe&) const = default;
};

struct RejectionRecord {
    size_t line;        // 1-based line number in the source file
    std::string reason;
};

struct LoadResult {
    std::vector<Recipe> recipes;
    std::vector<size_t> lines; // 1-based source line of each accepted recipe
    std::vector<RejectionRecord> rejections;
};

struct DerivedNutrition {
    double dry_weight = 0.0;
    std::map<std::string, double> normalized;  // per gram of dry weight
    std::map<std::string, double> per_100g;    // per 100 g of dry weight
    double sf_ratio = 0.0;                     // sugars / fiber; may be +inf
};

enum class SfPartition { Low, Mid, High };

inline constexpr double kSfCutoffLow = 1.0;
inline constexpr double kSfCutoffHigh = 13.0;

const char* to_string(SfPartition p);

// Validate a single recipe against the type invariants. Returns the
// rejection reason, or an empty string when valid.
std::string validate(const Recipe& r);

// JSON Lines corpus. Malformed lines become rejection records; an
// unreadable file throws.
LoadResult load_corpus(const std::filesystem::path& path);

// One recipe as a single JSON line (inverse of the loader).
std::string to_json_line(const Recipe& r);
void save_corpus(const std::vector<Recipe>& recipes, const std::filesystem::path& path);

void write_rejections_csv(const std::vector<RejectionRecord>& rejections,
                          const std::filesystem::path& path);

DerivedNutrition derive_nutrition(const Recipe& r);

SfPartition partition_by_sf(const DerivedNutrition& d);
SfPartition partition_by_sf(double sf_ratio);

// Curation: rank recipes ascending by each source's probability of the
// recipe's own noisy label, sum the two ranks, and take the lowest
// rank-sums per S/F partition (quota ceil(n/3) for Low and Mid, remainder
// for High). Ties break by recipe id.
std::vector<std::string> select_annotation_candidates(
    const std::vector<Recipe>& recipes,
    const std::vector<DerivedNutrition>& derived,
    const std::map<std::string, double>& probs_a,
    const std::map<std::string, double>& probs_b,
    size_t n_total);

} // namespace glyset::corpus
