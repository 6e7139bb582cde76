#include "glyset/cli.hpp"
#include "glyset/corpus.hpp"
#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

using namespace glyset;
using testsup::TempDir;

namespace {

namespace fs = std::filesystem;

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"glyset"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

// Thirty recipes, half sugary (low rating from the crowd), half not. Two
// malformed lines exercise the rejection path.
void write_pipeline_fixture(const fs::path& dir) {
    std::vector<corpus::Recipe> recipes;
    for (int i = 0; i < 30; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "r%03d", i);
        bool sugary = i % 2 == 0;
        corpus::Recipe r;
        r.id = id;
        if (sugary) {
            r.title = "Sticky Cake " + std::to_string(i);
            r.ingredients = {"2 cups sugar", "1 cup butter", "3 eggs", "2 cups flour"};
            r.directions = {"Cream the butter and sugar.", "Bake the cake until golden."};
            r.nutrients = {{"fat", 12.0 + i * 0.1}, {"saturated_fat", 6.0},
                           {"carbohydrates", 60.0}, {"sugars", 32.0 + i},
                           {"fiber", i % 4 == 0 ? 1.0 : 4.0}, {"protein", 5.0},
                           {"sodium", 0.5}};
            r.category_tags = {"dessert"};
        } else {
            r.title = "Lentil Salad " + std::to_string(i);
            r.ingredients = {"1 cup lentils", "2 cups spinach", "1 tbsp oil"};
            r.directions = {"Simmer the lentils.", "Toss with spinach and oil."};
            r.nutrients = {{"fat", 4.0}, {"saturated_fat", 0.5},
                           {"carbohydrates", 30.0 + i}, {"sugars", i % 6 == 1 ? 6.0 : 2.0},
                           {"fiber", 9.0}, {"protein", 11.0}, {"sodium", 0.2}};
            r.category_tags = {"salad", "low-glycemic"};
        }
        recipes.push_back(std::move(r));
    }
    std::string lines;
    for (const auto& r : recipes) lines += corpus::to_json_line(r) + "\n";
    lines += "{broken\n";
    lines += "{\"id\":\"r900\",\"title\":\"One Ingredient\",\"ingredients\":[\"water\"],"
             "\"directions\":[\"a\",\"b\"],\"nutrients\":{}}\n";
    testsup::write_file(dir / "corpus.jsonl", lines);

    // Four raters: sugary recipes score low, salads high, with one rater
    // occasionally unsure and another drifting by one.
    std::string judgments = "worker_id,recipe_id,rating\n";
    for (int i = 0; i < 30; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "r%03d", i);
        bool sugary = i % 2 == 0;
        int base = sugary ? 2 : 4;
        judgments += "w0," + std::string(id) + "," + std::to_string(sugary ? 1 : 5) + "\n";
        judgments += "w1," + std::string(id) + "," + std::to_string(base) + "\n";
        judgments += "w2," + std::string(id) + "," + std::to_string(base) + "\n";
        std::string w3 = i % 7 == 0 ? "NS" : std::to_string(i % 5 == 0 ? base + 1 : base);
        judgments += "w3," + std::string(id) + "," + w3 + "\n";
    }
    testsup::write_file(dir / "judgments.csv", judgments);
}

// Stage one: corpus and judgments only. Stage two adds the label files that
// aggregate produces, for the downstream subcommands.
void write_config(const fs::path& dir, const std::string& out_name) {
    nlohmann::json cfg;
    cfg["paths"]["corpus"] = (dir / "corpus.jsonl").string();
    cfg["paths"]["judgments"] = (dir / "judgments.csv").string();
    cfg["out_dir"] = (dir / out_name).string();
    cfg["seed"] = 4;
    cfg["jobs"] = 2;
    cfg["variants"] = {"nu", "bow-basic"};
    cfg["min_count"] = 2;
    testsup::write_file(dir / "config.json", cfg.dump(2));

    cfg["paths"]["labels"] = (dir / out_name / "labels.csv").string();
    cfg["paths"]["binary_labels"] = (dir / out_name / "binary_labels.csv").string();
    testsup::write_file(dir / "config2.json", cfg.dump(2));
}

} // namespace

TEST_CASE("the default decision thresholds span 0.45 to 0.55") {
    auto grid = cli::default_threshold_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 0.45);
    CHECK(grid[5] == 0.5);
    CHECK(grid.back() == 0.55);
}

TEST_CASE("config files are strict about keys and types") {
    TempDir dir;
    auto path = dir / "config.json";

    testsup::write_file(path, "{\"mystery\": 1}");
    CHECK_THROWS_WITH_AS(cli::load_run_config(path), "unknown config key: mystery", Error);

    testsup::write_file(path, "{\"paths\": {\"recipes\": \"x\"}}");
    CHECK_THROWS_WITH_AS(cli::load_run_config(path), "unknown config key: paths.recipes", Error);

    testsup::write_file(path, "{\"seed\": \"many\"}");
    CHECK_THROWS_WITH_AS(cli::load_run_config(path), "config field has the wrong type: seed",
                         Error);

    testsup::write_file(path, "[1,2]");
    CHECK_THROWS_WITH_AS(cli::load_run_config(path), "config root must be a JSON object", Error);

    CHECK_THROWS_AS(cli::load_run_config(dir / "nope.json"), Error);

    testsup::write_file(path,
                        "{\"seed\": 9, \"jobs\": 3, \"low_gi_tag\": \"low-gi\","
                        " \"c_grid\": [0.5], \"threshold_grid\": [0.5, 0.45],"
                        " \"paths\": {\"corpus\": \"c.jsonl\"}}");
    auto cfg = cli::load_run_config(path);
    CHECK(cfg.seed == 9);
    CHECK(cfg.jobs == 3);
    CHECK(cfg.low_gi_tag == "low-gi");
    CHECK(cfg.c_grid == std::vector<double>{0.5});
    CHECK(cfg.threshold_grid == std::vector<double>{0.5, 0.45});
    CHECK(cfg.corpus == fs::path("c.jsonl"));
    CHECK(cfg.out_dir == fs::path("out")); // default
}

TEST_CASE("the full pipeline runs end to end") {
    TempDir dir;
    write_pipeline_fixture(dir.path());
    write_config(dir.path(), "out");
    auto config = (dir / "config.json").string();
    auto config2 = (dir / "config2.json").string();
    auto out = dir / "out";

    // ingest: 30 accepted, 2 rejected, partitions tallied
    REQUIRE(run({"ingest", "--config", config}) == 0);
    auto ingest = nlohmann::json::parse(testsup::read_file(out / "ingest_summary.json"));
    CHECK(ingest["accepted"] == 30);
    CHECK(ingest["rejected"] == 2);
    int partition_total = ingest["sf_partitions"]["LOW"].get<int>() +
                          ingest["sf_partitions"]["MID"].get<int>() +
                          ingest["sf_partitions"]["HIGH"].get<int>();
    CHECK(partition_total == 30);
    auto rejections = csv::read_file(out / "rejections.csv");
    REQUIRE(rejections.size() == 3);
    CHECK(rejections[1] == std::vector<std::string>{"31", "invalid JSON"});
    CHECK(rejections[2] == std::vector<std::string>{"32", "fewer than two ingredients"});
    CHECK(corpus::load_corpus(out / "accepted.jsonl").recipes.size() == 30);

    // curate: nine candidates, header plus rows
    REQUIRE(run({"curate", "--config", config, "--n", "9"}) == 0);
    auto candidates = csv::read_file(out / "candidates.csv");
    REQUIRE(candidates.size() == 10);
    CHECK(candidates[0] == std::vector<std::string>{"recipe_id"});

    // aggregate: labels for all thirty recipes, sane summary
    REQUIRE(run({"aggregate", "--config", config}) == 0);
    auto agg = nlohmann::json::parse(testsup::read_file(out / "aggregate_summary.json"));
    CHECK(agg["n_recipes"] == 30);
    CHECK(agg["n_workers"] == 4);
    CHECK(agg["n_judgments"] == 120);
    CHECK(agg["em_converged"] == true);
    CHECK(agg["alpha"].get<double>() > 0.5);
    CHECK(agg["alpha_metric"] == "ordinal");
    int n_ud = agg["class_counts"]["UD"].get<int>();
    int n_hd = agg["class_counts"]["HD"].get<int>();
    CHECK(n_ud == 15);
    CHECK(n_hd == 15);
    CHECK(agg["excluded_not_sure"] == 0);

    // analyze: correlation and group-test tables parse and cover the parts
    REQUIRE(run({"analyze", "--config", config2}) == 0);
    auto corr = csv::read_file(out / "analyze_correlations.csv");
    REQUIRE(corr.size() == 6);
    CHECK(corr[0] == std::vector<std::string>{"component", "r", "p", "note"});
    CHECK(corr[1][0] == "fat");
    CHECK(corr[5][0] == "total");
    // Sugars track the planted unhealthiness: strongly negative correlation.
    CHECK(std::stod(corr[3][1]) < -0.5);
    auto groups = csv::read_file(out / "analyze_group_tests.csv");
    REQUIRE(groups.size() == 6);
    CHECK(groups[0] ==
          std::vector<std::string>{"component", "kw_h", "kw_p", "dunn_z", "dunn_p",
                                   "significant", "note"});
    auto fsa = csv::read_file(out / "fsa_scores.csv");
    CHECK(fsa.size() == 31); // header + one row per labeled recipe

    // evaluate: two variants, five folds each, strong scores on easy data
    REQUIRE(run({"evaluate", "--config", config2}) == 0);
    auto report = csv::read_file(out / "eval_report.csv");
    REQUIRE(report.size() == 11);
    CHECK(report[0] == std::vector<std::string>{"variant", "fold", "precision", "recall", "F1",
                                                "C", "threshold"});
    auto summary = nlohmann::json::parse(testsup::read_file(out / "eval_summary.json"));
    REQUIRE(summary["variants"].size() == 2);
    for (const auto& v : summary["variants"]) {
        CHECK(v["mean_f1"].get<double>() > 0.8);
        CHECK(v["folds"].size() == 5);
    }
    int models = 0;
    for (const auto& e : fs::directory_iterator(out / "models")) {
        CHECK(e.path().extension() == ".json");
        ++models;
    }
    CHECK(models == 10);

    // inspect: weight tables for a trained model
    REQUIRE(run({"inspect", "--config", config2, "--model",
                 (out / "models" / "nu-fold0.json").string()}) == 0);
    auto nu_weights = csv::read_file(out / "nu_weights.csv");
    CHECK(nu_weights[0] == std::vector<std::string>{"column", "weight"});
    CHECK(nu_weights.size() == 9); // seven nutrients plus dry weight, after the header
    auto nb_weights = csv::read_file(out / "nb_weights.csv");
    CHECK(nb_weights[0] == std::vector<std::string>{"direction", "token", "weight"});
    CHECK(nb_weights.size() > 1);
}

TEST_CASE("ingest reruns are byte-identical") {
    TempDir dir;
    write_pipeline_fixture(dir.path());
    write_config(dir.path(), "out1");
    REQUIRE(run({"ingest", "--config", (dir / "config.json").string()}) == 0);
    REQUIRE(run({"ingest", "--config", (dir / "config.json").string(), "--out",
                 (dir / "out2").string()}) == 0);
    for (const char* name : {"accepted.jsonl", "rejections.csv", "ingest_summary.json"}) {
        CHECK(testsup::read_file(dir / "out1" / name) == testsup::read_file(dir / "out2" / name));
    }
}

TEST_CASE("failures surface as a nonzero exit before any output") {
    TempDir dir;
    write_pipeline_fixture(dir.path());
    write_config(dir.path(), "out");
    auto config = (dir / "config.json").string();

    CHECK(run({"ingest", "--config", (dir / "absent.json").string()}) == 1);
    CHECK(run({"curate", "--config", config}) == 1); // no --n
    CHECK(run({"evaluate", "--config", config, "--variants", "bogus"}) == 1);
    CHECK(run({"aggregate"}) == 1); // no config, no judgments path
    CHECK_FALSE(fs::exists(dir / "out"));

    // Unknown flags and missing subcommands are argument-parser failures.
    CHECK(run({"frobnicate", "--config", config}) != 0);
    CHECK(run({}) != 0);
}

TEST_CASE("evaluate requires labels that match the corpus") {
    TempDir dir;
    write_pipeline_fixture(dir.path());
    write_config(dir.path(), "out");
    fs::create_directories(dir / "out");
    testsup::write_file(dir / "out" / "labels.csv",
                        "recipe_id,label,p1,p2,p3,p4,p5,pNS\n");
    testsup::write_file(dir / "out" / "binary_labels.csv",
                        "recipe_id,class\nghost,UD\nr001,HD\n");
    CHECK(run({"evaluate", "--config", (dir / "config2.json").string()}) == 1);
}
