#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace glyset::healthiness {

// Per-nutrient traffic-light band edges in g per 100 g. At or below
// green_max scores 1 (green), at or below amber_max scores 2 (amber),
// above scores 3 (red).
struct Band {
    double green_max;
    double amber_max;
};

struct FsaThresholds {
    Band fat{3.0, 17.5};
    Band saturated_fat{1.5, 5.0};
    Band sugars{5.0, 22.5};
    Band salt{0.3, 1.5};

    static FsaThresholds defaults() { return {}; }
    // CSV nutrient,green_max,amber_max; unknown nutrient names are errors.
    static FsaThresholds load_csv(const std::filesystem::path& path);
    void validate() const; // green_max < amber_max per nutrient
};

// Allrecipes-style data carries sodium (Na); the guidance bands are for
// salt (NaCl).
double salt_from_sodium(double sodium_g);

struct FsaScore {
    int fat_pts;
    int satfat_pts;
    int sugars_pts;
    int salt_pts;

    int total() const { return fat_pts + satfat_pts + sugars_pts + salt_pts; }
};

// per_100g must contain fat, saturated_fat, sugars, and sodium; salt is
// derived from sodium before banding. Total ranges 4 (all green) to 12
// (all red).
FsaScore fsa_score(const std::map<std::string, double>& per_100g,
                   const FsaThresholds& thresholds = FsaThresholds::defaults());

} // namespace glyset::healthiness
