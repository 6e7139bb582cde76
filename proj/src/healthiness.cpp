#include "glyset/healthiness.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"

namespace glyset::healthiness {

FsaThresholds FsaThresholds::load_csv(const std::filesystem::path& path) {
    auto rows = csv::read_file(path);
    FsaThresholds t;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 && !rows[i].empty() && rows[i][0] == "nutrient") continue;
        if (rows[i].size() != 3) throw Error("malformed thresholds row " + std::to_string(i + 1));
        Band band{std::stod(rows[i][1]), std::stod(rows[i][2])};
        const std::string& name = rows[i][0];
        if (name == "fat") t.fat = band;
        else if (name == "saturated_fat") t.saturated_fat = band;
        else if (name == "sugars") t.sugars = band;
        else if (name == "salt") t.salt = band;
        else throw Error("unknown threshold nutrient: " + name);
    }
    t.validate();
    return t;
}

void FsaThresholds::validate() const {
    for (const auto& [name, band] : std::initializer_list<std::pair<const char*, Band>>{
             {"fat", fat}, {"saturated_fat", saturated_fat}, {"sugars", sugars}, {"salt", salt}}) {
        if (!(band.green_max < band.amber_max)) {
            throw Error(std::string("invalid thresholds for ") + name +
                        ": green_max must be below amber_max");
        }
    }
}

double salt_from_sodium(double sodium_g) {
    if (sodium_g < 0.0) throw Error("negative sodium amount");
    return 2.54 * sodium_g;
}

namespace {

int band_points(double amount, const Band& band) {
    if (amount <= band.green_max) return 1;
    if (amount <= band.amber_max) return 2;
    return 3;
}

double fetch(const std::map<std::string, double>& m, const char* name) {
    auto it = m.find(name);
    if (it == m.end()) throw Error(std::string("missing nutrient: ") + name);
    return it->second;
}

} // namespace

FsaScore fsa_score(const std::map<std::string, double>& per_100g,
                   const FsaThresholds& thresholds) {
    thresholds.validate();
    FsaScore s{};
    s.fat_pts = band_points(fetch(per_100g, "fat"), thresholds.fat);
    s.satfat_pts = band_points(fetch(per_100g, "saturated_fat"), thresholds.saturated_fat);
    s.sugars_pts = band_points(fetch(per_100g, "sugars"), thresholds.sugars);
    s.salt_pts = band_points(salt_from_sodium(fetch(per_100g, "sodium")), thresholds.salt);
    return s;
}

} // namespace glyset::healthiness
