#include "glyset/errors.hpp"
#include "glyset/healthiness.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <map>
#include <string>

using namespace glyset;
using testsup::TempDir;

namespace {

std::map<std::string, double> per100(double fat, double satfat, double sugars, double sodium) {
    return {{"fat", fat}, {"saturated_fat", satfat}, {"sugars", sugars}, {"sodium", sodium}};
}

} // namespace

TEST_CASE("salt is sodium times 2.54") {
    CHECK(healthiness::salt_from_sodium(0.0) == 0.0);
    CHECK(healthiness::salt_from_sodium(1.0) == 2.54);
    CHECK(healthiness::salt_from_sodium(0.25) == 2.54 * 0.25);
    CHECK_THROWS_WITH_AS(healthiness::salt_from_sodium(-0.1), "negative sodium amount", Error);
}

TEST_CASE("band edges are inclusive on the healthy side") {
    auto t = healthiness::FsaThresholds::defaults();

    // Exactly on green_max stays green; just above turns amber; exactly on
    // amber_max stays amber; above turns red.
    CHECK(healthiness::fsa_score(per100(3.0, 0.0, 0.0, 0.0), t).fat_pts == 1);
    CHECK(healthiness::fsa_score(per100(3.01, 0.0, 0.0, 0.0), t).fat_pts == 2);
    CHECK(healthiness::fsa_score(per100(17.5, 0.0, 0.0, 0.0), t).fat_pts == 2);
    CHECK(healthiness::fsa_score(per100(17.51, 0.0, 0.0, 0.0), t).fat_pts == 3);

    CHECK(healthiness::fsa_score(per100(0.0, 1.5, 0.0, 0.0), t).satfat_pts == 1);
    CHECK(healthiness::fsa_score(per100(0.0, 5.0, 0.0, 0.0), t).satfat_pts == 2);
    CHECK(healthiness::fsa_score(per100(0.0, 5.1, 0.0, 0.0), t).satfat_pts == 3);

    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 5.0, 0.0), t).sugars_pts == 1);
    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 22.5, 0.0), t).sugars_pts == 2);
    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 22.6, 0.0), t).sugars_pts == 3);

    // Salt bands apply to 2.54 * sodium.
    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 0.0, 0.1), t).salt_pts == 1);  // 0.254
    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 0.0, 0.2), t).salt_pts == 2);  // 0.508
    CHECK(healthiness::fsa_score(per100(0.0, 0.0, 0.0, 1.0), t).salt_pts == 3);  // 2.54
}

TEST_CASE("total spans four to twelve") {
    auto all_green = healthiness::fsa_score(per100(0.0, 0.0, 0.0, 0.0));
    CHECK(all_green.total() == 4);
    auto all_red = healthiness::fsa_score(per100(100.0, 100.0, 100.0, 100.0));
    CHECK(all_red.total() == 12);
    auto mixed = healthiness::fsa_score(per100(10.0, 0.5, 30.0, 0.0));
    CHECK(mixed.fat_pts == 2);
    CHECK(mixed.satfat_pts == 1);
    CHECK(mixed.sugars_pts == 3);
    CHECK(mixed.salt_pts == 1);
    CHECK(mixed.total() == 7);
}

TEST_CASE("scoring requires the four inputs") {
    CHECK_THROWS_WITH_AS(
        healthiness::fsa_score({{"fat", 1.0}, {"saturated_fat", 1.0}, {"sugars", 1.0}}),
        "missing nutrient: sodium", Error);
}

TEST_CASE("threshold tables load from csv") {
    TempDir dir;
    auto path = dir / "bands.csv";
    testsup::write_file(path,
                        "nutrient,green_max,amber_max\n"
                        "salt,0.2,1.0\n"
                        "fat,4.0,20.0\n");
    auto t = healthiness::FsaThresholds::load_csv(path);
    CHECK(t.fat.green_max == 4.0);
    CHECK(t.fat.amber_max == 20.0);
    CHECK(t.salt.green_max == 0.2);
    // Unmentioned nutrients keep their defaults.
    CHECK(t.sugars.green_max == 5.0);
    CHECK(t.sugars.amber_max == 22.5);

    testsup::write_file(path, "nutrient,green_max,amber_max\ncaffeine,1,2\n");
    CHECK_THROWS_WITH_AS(healthiness::FsaThresholds::load_csv(path),
                         "unknown threshold nutrient: caffeine", Error);

    testsup::write_file(path, "nutrient,green_max,amber_max\nfat,10,10\n");
    CHECK_THROWS_WITH_AS(healthiness::FsaThresholds::load_csv(path),
                         "invalid thresholds for fat: green_max must be below amber_max", Error);
}
