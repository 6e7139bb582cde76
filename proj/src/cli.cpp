#include "glyset/cli.hpp"

#include "glyset/classifier.hpp"
#include "glyset/corpus.hpp"
#include "glyset/crowd.hpp"
#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"
#include "glyset/eval.hpp"
#include "glyset/features.hpp"
#include "glyset/healthiness.hpp"
#include "glyset/log.hpp"
#include "glyset/stats.hpp"
#include "glyset/textprep.hpp"
#include "glyset/variants.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace glyset::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    for (int i = 45; i <= 55; ++i) grid.push_back(static_cast<double>(i) / 100.0);
    return grid;
}

namespace {

void expect_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw Error("unknown config key: " + where + key);
    }
}

template <typename T>
void read_field(const json& j, const char* name, T& dst) {
    auto it = j.find(name);
    if (it == j.end()) return;
    try {
        dst = it->get<T>();
    } catch (const json::exception&) {
        throw Error(std::string("config field has the wrong type: ") + name);
    }
}

void read_path(const json& j, const char* name, fs::path& dst) {
    std::string s;
    read_field(j, name, s);
    if (!s.empty()) dst = s;
}

} // namespace

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("invalid config JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error("config root must be a JSON object");
    expect_keys(j, {"paths", "out_dir", "seed", "jobs", "c_grid", "threshold_grid", "variants",
                    "low_gi_tag", "alpha_metric", "n_candidates", "min_count", "top_k"},
                "");

    RunConfig cfg;
    if (j.count("paths")) {
        const json& jp = j.at("paths");
        if (!jp.is_object()) throw Error("config field has the wrong type: paths");
        expect_keys(jp, {"corpus", "judgments", "embeddings", "stop_list", "thresholds",
                         "labels", "binary_labels"},
                    "paths.");
        read_path(jp, "corpus", cfg.corpus);
        read_path(jp, "judgments", cfg.judgments);
        read_path(jp, "embeddings", cfg.embeddings);
        read_path(jp, "stop_list", cfg.stop_list);
        read_path(jp, "thresholds", cfg.thresholds);
        read_path(jp, "labels", cfg.labels);
        read_path(jp, "binary_labels", cfg.binary_labels);
    }
    read_path(j, "out_dir", cfg.out_dir);
    read_field(j, "seed", cfg.seed);
    read_field(j, "jobs", cfg.jobs);
    read_field(j, "c_grid", cfg.c_grid);
    read_field(j, "threshold_grid", cfg.threshold_grid);
    read_field(j, "variants", cfg.variants);
    read_field(j, "low_gi_tag", cfg.low_gi_tag);
    read_field(j, "alpha_metric", cfg.alpha_metric);
    read_field(j, "n_candidates", cfg.n_candidates);
    read_field(j, "min_count", cfg.min_count);
    read_field(j, "top_k", cfg.top_k);
    return cfg;
}

namespace {

std::vector<double> resolved_thresholds(const RunConfig& cfg) {
    return cfg.threshold_grid.empty() ? default_threshold_grid() : cfg.threshold_grid;
}

void require_path(const fs::path& p, const char* what) {
    if (p.empty()) throw Error(std::string(what) + " path not configured");
    if (!fs::exists(p)) throw Error(std::string(what) + " path does not exist: " + p.string());
}

// The config invariant: every referenced path exists before any output is
// produced.
void validate_common(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw Error("output directory not configured");
    if (cfg.jobs < 1) throw Error("jobs must be at least 1");
    if (cfg.min_count < 1) throw Error("min_count must be at least 1");
    if (cfg.top_k < 1) throw Error("top_k must be at least 1");
    if (cfg.alpha_metric != "ordinal" && cfg.alpha_metric != "interval") {
        throw Error("alpha_metric must be ordinal or interval: " + cfg.alpha_metric);
    }
    if (cfg.c_grid.empty()) throw Error("c_grid must not be empty");
    for (double c : cfg.c_grid) {
        if (!(c > 0.0) || !std::isfinite(c)) throw Error("c_grid values must be positive");
    }
    for (double t : resolved_thresholds(cfg)) {
        if (!(t >= 0.45 && t <= 0.55)) {
            throw Error("threshold_grid values must lie in [0.45, 0.55]");
        }
    }
    for (const auto& v : cfg.variants) {
        const auto& names = variants::valid_names();
        if (std::find(names.begin(), names.end(), v) == names.end()) {
            std::string valid;
            for (const auto& n : names) {
                if (!valid.empty()) valid += ", ";
                valid += n;
            }
            throw Error("unknown variant: " + v + " (valid: " + valid + ")");
        }
    }
    for (const auto& [p, what] :
         std::initializer_list<std::pair<const fs::path*, const char*>>{
             {&cfg.corpus, "corpus"},
             {&cfg.judgments, "judgments"},
             {&cfg.embeddings, "embeddings"},
             {&cfg.stop_list, "stop_list"},
             {&cfg.thresholds, "thresholds"},
             {&cfg.labels, "labels"},
             {&cfg.binary_labels, "binary_labels"}}) {
        if (!p->empty() && !fs::exists(*p)) {
            throw Error(std::string(what) + " path does not exist: " + p->string());
        }
    }
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

struct LoadedCorpus {
    std::vector<corpus::Recipe> recipes;
    std::vector<corpus::DerivedNutrition> derived;
};

// Accepted, derivable recipes in file order; invalid lines and zero-dry-
// weight recipes are dropped with a warning.
LoadedCorpus load_usable_corpus(const fs::path& path) {
    auto loaded = corpus::load_corpus(path);
    if (!loaded.rejections.empty()) {
        log::warn(std::to_string(loaded.rejections.size()) + " invalid corpus lines ignored in " +
                  path.string());
    }
    LoadedCorpus out;
    for (auto& r : loaded.recipes) {
        try {
            out.derived.push_back(corpus::derive_nutrition(r));
        } catch (const Error& e) {
            log::warn(std::string("recipe dropped: ") + e.what());
            continue;
        }
        out.recipes.push_back(std::move(r));
    }
    if (out.recipes.empty()) throw Error("no usable recipes in " + path.string());
    return out;
}

std::vector<std::string> load_stoplist_or_default(const RunConfig& cfg) {
    if (cfg.stop_list.empty()) return textprep::default_quantity_stoplist();
    return textprep::load_stoplist(cfg.stop_list);
}

// Recipes in corpus order restricted to labeled ids, plus aligned classes.
struct LabeledCorpus {
    std::vector<corpus::Recipe> recipes;
    std::vector<BinaryClass> labels;
};

LabeledCorpus align_labels(std::vector<corpus::Recipe> recipes,
                           const std::vector<crowd::BinaryLabel>& labels) {
    std::map<std::string, BinaryClass> by_id;
    for (const auto& l : labels) by_id.emplace(l.recipe_id, l.cls);

    LabeledCorpus out;
    std::set<std::string> seen;
    for (auto& r : recipes) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) continue;
        seen.insert(r.id);
        out.labels.push_back(it->second);
        out.recipes.push_back(std::move(r));
    }
    for (const auto& [id, _] : by_id) {
        if (!seen.count(id)) throw Error("labeled recipe not in corpus: " + id);
    }
    return out;
}

} // namespace

void cmd_ingest(const RunConfig& cfg) {
    validate_common(cfg);
    require_path(cfg.corpus, "corpus");
    fs::create_directories(cfg.out_dir);

    auto loaded = corpus::load_corpus(cfg.corpus);
    std::vector<corpus::Recipe> accepted;
    auto rejections = loaded.rejections;
    std::map<std::string, size_t> histogram = {{"LOW", 0}, {"MID", 0}, {"HIGH", 0}};
    for (size_t i = 0; i < loaded.recipes.size(); ++i) {
        corpus::DerivedNutrition d;
        try {
            d = corpus::derive_nutrition(loaded.recipes[i]);
        } catch (const Error&) {
            rejections.push_back({loaded.lines[i], "zero dry weight"});
            continue;
        }
        ++histogram[corpus::to_string(corpus::partition_by_sf(d))];
        accepted.push_back(std::move(loaded.recipes[i]));
    }
    std::sort(rejections.begin(), rejections.end(),
              [](const auto& a, const auto& b) { return a.line < b.line; });

    corpus::save_corpus(accepted, cfg.out_dir / "accepted.jsonl");
    corpus::write_rejections_csv(rejections, cfg.out_dir / "rejections.csv");
    json summary;
    summary["accepted"] = accepted.size();
    summary["rejected"] = rejections.size();
    summary["sf_partitions"] = histogram;
    write_json_file(summary, cfg.out_dir / "ingest_summary.json");
    log::info("ingest: accepted " + std::to_string(accepted.size()) + ", rejected " +
              std::to_string(rejections.size()));
}

void cmd_curate(const RunConfig& cfg) {
    validate_common(cfg);
    require_path(cfg.corpus, "corpus");
    if (cfg.n_candidates < 1) throw Error("curate needs n_candidates >= 1 (or --n)");

    auto usable = load_usable_corpus(cfg.corpus);
    const auto& recipes = usable.recipes;
    if (cfg.n_candidates > recipes.size()) {
        throw Error("n_candidates exceeds usable corpus size (" +
                    std::to_string(recipes.size()) + ")");
    }
    fs::create_directories(cfg.out_dir);

    auto names = features::common_nutrient_names(recipes);
    auto nu = features::nutritional_matrix(recipes, usable.derived, names);
    std::vector<size_t> all_rows(recipes.size());
    for (size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    auto x = features::apply_standardizer(features::fit_standardizer(nu, all_rows), nu);

    // Each noisy source scores every recipe with the model probability of
    // the recipe's own source label; low probability = model disagreement.
    auto source_probs =
        [&](const std::vector<BinaryClass>& labels) -> std::optional<std::map<std::string, double>> {
        bool ud = false, hd = false;
        for (auto c : labels) (c == BinaryClass::UD ? ud : hd) = true;
        if (!ud || !hd) return std::nullopt;
        auto model = classifier::train_lr(x, all_rows, labels, 1.0);
        auto probs = classifier::predict_proba(model, x);
        std::map<std::string, double> out;
        for (size_t i = 0; i < recipes.size(); ++i) {
            out[recipes[i].id] = labels[i] == BinaryClass::UD ? probs[i] : 1.0 - probs[i];
        }
        return out;
    };

    std::vector<BinaryClass> tag_labels, sf_labels;
    for (size_t i = 0; i < recipes.size(); ++i) {
        tag_labels.push_back(recipes[i].category_tags.count(cfg.low_gi_tag) ? BinaryClass::HD
                                                                            : BinaryClass::UD);
        sf_labels.push_back(usable.derived[i].sf_ratio < corpus::kSfCutoffLow ? BinaryClass::HD
                                                                              : BinaryClass::UD);
    }
    auto probs_a = source_probs(tag_labels);
    auto probs_b = source_probs(sf_labels);
    if (!probs_a && !probs_b) throw Error("neither noisy source has two classes");
    if (!probs_a) {
        log::warn("category-tag source has a single class; using the S/F source only");
        probs_a = probs_b;
    }
    if (!probs_b) {
        log::warn("S/F source has a single class; using the category-tag source only");
        probs_b = probs_a;
    }

    auto ids = corpus::select_annotation_candidates(recipes, usable.derived, *probs_a, *probs_b,
                                                    cfg.n_candidates);
    std::ofstream out(cfg.out_dir / "candidates.csv", std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + (cfg.out_dir / "candidates.csv").string());
    csv::write_row(out, {"recipe_id"});
    for (const auto& id : ids) csv::write_row(out, {id});
    log::info("curate: selected " + std::to_string(ids.size()) + " candidates");
}

void cmd_aggregate(const RunConfig& cfg) {
    validate_common(cfg);
    require_path(cfg.judgments, "judgments");
    fs::create_directories(cfg.out_dir);

    auto js = crowd::load_judgments_csv(cfg.judgments);
    auto metric = cfg.alpha_metric == "interval" ? crowd::AlphaMetric::Interval
                                                 : crowd::AlphaMetric::Ordinal;
    double alpha = crowd::krippendorff_alpha(js, metric);
    auto ds = crowd::dawid_skene(js);
    auto bin = crowd::binarize(ds.labels);

    crowd::write_aggregated_csv(ds.labels, cfg.out_dir / "labels.csv");
    crowd::write_binary_labels_csv(bin.labels, cfg.out_dir / "binary_labels.csv");

    size_t n_ud = 0;
    for (const auto& l : bin.labels) n_ud += (l.cls == BinaryClass::UD);
    json summary;
    summary["alpha"] = alpha;
    summary["alpha_metric"] = cfg.alpha_metric;
    summary["n_recipes"] = js.recipe_ids().size();
    summary["n_workers"] = js.worker_ids().size();
    summary["n_judgments"] = js.judgments().size();
    summary["em_iterations"] = ds.iterations;
    summary["em_converged"] = ds.converged;
    summary["excluded_not_sure"] = bin.excluded;
    summary["class_counts"] = {{"UD", n_ud}, {"HD", bin.labels.size() - n_ud}};
    write_json_file(summary, cfg.out_dir / "aggregate_summary.json");
    log::info("aggregate: " + std::to_string(bin.labels.size()) + " labeled recipes, alpha " +
              csv::format_double(alpha));
}

void cmd_analyze(const RunConfig& cfg) {
    validate_common(cfg);
    require_path(cfg.corpus, "corpus");
    require_path(cfg.labels, "labels");
    auto thresholds = cfg.thresholds.empty() ? healthiness::FsaThresholds::defaults()
                                             : healthiness::FsaThresholds::load_csv(cfg.thresholds);
    thresholds.validate();

    auto usable = load_usable_corpus(cfg.corpus);
    std::map<std::string, size_t> row_of;
    for (size_t i = 0; i < usable.recipes.size(); ++i) row_of[usable.recipes[i].id] = i;

    auto aggregated = crowd::load_aggregated_csv(cfg.labels);
    struct Scored {
        std::string id;
        int rating; // 1..5 or kNotSure
        healthiness::FsaScore fsa;
    };
    std::vector<Scored> scored;
    for (const auto& agg : aggregated) {
        auto it = row_of.find(agg.recipe_id);
        if (it == row_of.end()) throw Error("labeled recipe not in corpus: " + agg.recipe_id);
        const auto& d = usable.derived[it->second];
        scored.push_back({agg.recipe_id, agg.label, healthiness::fsa_score(d.per_100g, thresholds)});
    }
    if (scored.empty()) throw Error("no labeled recipes to analyze");
    fs::create_directories(cfg.out_dir);

    {
        std::ofstream out(cfg.out_dir / "fsa_scores.csv", std::ios::binary);
        if (!out) throw Error("cannot open for writing: " +
                              (cfg.out_dir / "fsa_scores.csv").string());
        csv::write_row(out, {"recipe_id", "fat_pts", "satfat_pts", "sugars_pts", "salt_pts",
                             "total"});
        for (const auto& s : scored) {
            csv::write_row(out, {s.id, std::to_string(s.fsa.fat_pts),
                                 std::to_string(s.fsa.satfat_pts),
                                 std::to_string(s.fsa.sugars_pts), std::to_string(s.fsa.salt_pts),
                                 std::to_string(s.fsa.total())});
        }
    }

    const std::vector<std::pair<std::string, std::function<int(const healthiness::FsaScore&)>>>
        components = {{"fat", [](const auto& f) { return f.fat_pts; }},
                      {"satfat", [](const auto& f) { return f.satfat_pts; }},
                      {"sugars", [](const auto& f) { return f.sugars_pts; }},
                      {"salt", [](const auto& f) { return f.salt_pts; }},
                      {"total", [](const auto& f) { return f.total(); }}};

    // Ratings correlate against each score component; not-sure recipes
    // carry no rating and are excluded here.
    std::vector<const Scored*> rated;
    for (const auto& s : scored) {
        if (s.rating != crowd::kNotSure) rated.push_back(&s);
    }
    {
        std::ofstream out(cfg.out_dir / "analyze_correlations.csv", std::ios::binary);
        if (!out) throw Error("cannot open for writing: " +
                              (cfg.out_dir / "analyze_correlations.csv").string());
        csv::write_row(out, {"component", "r", "p", "note"});
        std::vector<double> ratings;
        for (const auto* s : rated) ratings.push_back(static_cast<double>(s->rating));
        for (const auto& [name, get] : components) {
            std::vector<double> xs;
            for (const auto* s : rated) xs.push_back(static_cast<double>(get(s->fsa)));
            try {
                auto corr = stats::pearson_r(xs, ratings);
                csv::write_row(out, {name, csv::format_double(corr.r),
                                     csv::format_double(corr.p), ""});
            } catch (const Error& e) {
                csv::write_row(out, {name, "", "", e.what()});
            }
        }
    }

    {
        std::ofstream out(cfg.out_dir / "analyze_group_tests.csv", std::ios::binary);
        if (!out) throw Error("cannot open for writing: " +
                              (cfg.out_dir / "analyze_group_tests.csv").string());
        csv::write_row(out, {"component", "kw_h", "kw_p", "dunn_z", "dunn_p", "significant",
                             "note"});
        for (const auto& [name, get] : components) {
            stats::Sample ud{"UD", {}}, hd{"HD", {}};
            for (const auto* s : rated) {
                (s->rating <= 3 ? ud : hd).values.push_back(static_cast<double>(get(s->fsa)));
            }
            try {
                auto kw = stats::kruskal_wallis({ud, hd});
                auto dunn = stats::dunn_test({ud, hd}, stats::Adjustment::Bonferroni);
                const auto& pair = dunn.at(0);
                csv::write_row(out, {name, csv::format_double(kw.statistic),
                                     csv::format_double(kw.p_value), csv::format_double(pair.z),
                                     csv::format_double(pair.adjusted_p),
                                     pair.adjusted_p < 0.05 ? "1" : "0", ""});
            } catch (const Error& e) {
                csv::write_row(out, {name, "", "", "", "", "0", e.what()});
            }
        }
    }
    log::info("analyze: scored " + std::to_string(scored.size()) + " recipes");
}

void cmd_evaluate(const RunConfig& cfg) {
    validate_common(cfg);
    require_path(cfg.corpus, "corpus");
    require_path(cfg.binary_labels, "binary labels");

    auto usable = load_usable_corpus(cfg.corpus);
    auto binary = crowd::load_binary_labels_csv(cfg.binary_labels);
    auto labeled = align_labels(std::move(usable.recipes), binary);

    auto stoplist = load_stoplist_or_default(cfg);
    std::optional<features::EmbeddingTable> table;
    if (!cfg.embeddings.empty()) table = features::load_embeddings(cfg.embeddings);

    std::vector<std::string> names = cfg.variants;
    if (names.empty()) {
        for (const auto& n : variants::valid_names()) {
            bool needs_table = n == "embedding" || n == "nu+embedding";
            if (!needs_table || table) names.push_back(n);
        }
    }

    variants::VariantContext ctx(labeled.recipes, labeled.labels, stoplist,
                                 table ? &*table : nullptr, cfg.min_count, cfg.jobs);
    auto specs = ctx.make_all(names);
    auto plan = eval::make_fold_plan(labeled.labels, cfg.seed);
    auto report = eval::run_nested_cv(specs, labeled.labels, plan, cfg.c_grid,
                                      resolved_thresholds(cfg), {}, cfg.jobs);
    report.significance = eval::compare_variants(report);

    fs::create_directories(cfg.out_dir / "models");
    eval::write_report_csv(report, cfg.out_dir / "eval_report.csv");
    eval::write_report_json(report, cfg.out_dir / "eval_summary.json");
    for (const auto& v : report.variants) {
        if (!v.error.empty()) continue;
        for (const auto& f : v.folds) {
            classifier::save_model(f.model, cfg.out_dir / "models" /
                                                (v.name + "-fold" + std::to_string(f.fold) +
                                                 ".json"));
        }
    }
    log::info("evaluate: " + std::to_string(report.variants.size()) + " variants over " +
              std::to_string(plan.outer.size()) + " outer folds");
}

void cmd_inspect(const RunConfig& cfg, const fs::path& model_path) {
    validate_common(cfg);
    require_path(cfg.corpus, "corpus");
    require_path(cfg.binary_labels, "binary labels");
    require_path(model_path, "model");
    auto model = classifier::load_model(model_path);

    auto usable = load_usable_corpus(cfg.corpus);
    auto binary = crowd::load_binary_labels_csv(cfg.binary_labels);
    auto labeled = align_labels(std::move(usable.recipes), binary);
    auto stoplist = load_stoplist_or_default(cfg);
    fs::create_directories(cfg.out_dir);

    const size_t k = static_cast<size_t>(cfg.top_k);
    {
        // Model coefficients on the nutritional block, largest magnitude
        // first.
        std::vector<std::pair<std::string, double>> nu;
        for (size_t c = 0; c < model.columns.size(); ++c) {
            if (model.columns[c].rfind("nu:", 0) == 0) {
                nu.emplace_back(model.columns[c].substr(3), model.weights[c]);
            }
        }
        if (nu.empty()) log::warn("model has no nutritional columns; nu_weights.csv is empty");
        std::sort(nu.begin(), nu.end(), [](const auto& a, const auto& b) {
            if (std::abs(a.second) != std::abs(b.second))
                return std::abs(a.second) > std::abs(b.second);
            return a.first < b.first;
        });
        if (nu.size() > k) nu.resize(k);
        std::ofstream out(cfg.out_dir / "nu_weights.csv", std::ios::binary);
        if (!out) throw Error("cannot open for writing: " +
                              (cfg.out_dir / "nu_weights.csv").string());
        csv::write_row(out, {"column", "weight"});
        for (const auto& [name, w] : nu) csv::write_row(out, {name, csv::format_double(w)});
    }

    {
        // Naive Bayes log-count ratios refit on the full labeled corpus,
        // the error-analysis ranking.
        std::vector<textprep::TokenizedRecipe> tokenized;
        for (const auto& r : labeled.recipes) tokenized.push_back(textprep::tokenize(r, stoplist));
        auto vocab = textprep::build_vocabulary(tokenized, cfg.min_count, /*parsed=*/false);
        if (vocab.size() == 0) throw Error("vocabulary is empty; lower min_count");
        auto counts = features::bow_matrix(tokenized, vocab, /*parsed=*/false, cfg.jobs);
        std::vector<size_t> all_rows(counts.rows());
        for (size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
        auto w = features::fit_nb_weights(counts, all_rows, labeled.labels);

        std::vector<size_t> order(vocab.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        auto by_weight_desc = [&](size_t a, size_t b) {
            if (w.r[a] != w.r[b]) return w.r[a] > w.r[b];
            return vocab.tokens[a] < vocab.tokens[b];
        };
        std::sort(order.begin(), order.end(), by_weight_desc);

        std::ofstream out(cfg.out_dir / "nb_weights.csv", std::ios::binary);
        if (!out) throw Error("cannot open for writing: " +
                              (cfg.out_dir / "nb_weights.csv").string());
        csv::write_row(out, {"direction", "token", "weight"});
        size_t written = 0;
        for (size_t i : order) {
            if (w.r[i] <= 0.0 || written == k) break;
            csv::write_row(out, {"positive", vocab.tokens[i], csv::format_double(w.r[i])});
            ++written;
        }
        written = 0;
        for (size_t pos = order.size(); pos-- > 0;) {
            size_t i = order[pos];
            if (w.r[i] >= 0.0 || written == k) break;
            csv::write_row(out, {"negative", vocab.tokens[i], csv::format_double(w.r[i])});
            ++written;
        }
    }
    log::info("inspect: wrote weight rankings for " + model_path.string());
}

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"recipe glycemic-impact pipeline"};
    app.fallthrough();

    std::string config_path, out_dir, variants_csv, model_path;
    uint64_t seed = 0;
    int jobs = 1;
    uint64_t n_candidates = 0;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_option("--jobs", jobs, "worker thread cap (overrides config)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--variants", variants_csv,
                   "comma-separated feature sets (overrides config)");

    auto* ingest = app.add_subcommand("ingest", "validate and accept a recipe corpus");
    auto* curate = app.add_subcommand("curate", "select annotation candidates");
    curate->add_option("--n", n_candidates, "number of candidates (overrides config)");
    auto* aggregate = app.add_subcommand("aggregate", "aggregate crowd judgments into labels");
    auto* analyze = app.add_subcommand("analyze", "traffic-light scores versus judgments");
    auto* evaluate = app.add_subcommand("evaluate", "nested cross-validated classification");
    auto* inspect = app.add_subcommand("inspect", "rank model and text weights");
    inspect->add_option("--model", model_path, "trained model JSON")->required();
    for (auto* sub : {ingest, curate, aggregate, analyze, evaluate, inspect}) {
        sub->fallthrough();
    }
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--jobs")) cfg.jobs = jobs;
        if (app.count("--out")) cfg.out_dir = out_dir;
        if (app.count("--variants")) cfg.variants = split_csv_list(variants_csv);
        if (curate->count("--n")) cfg.n_candidates = n_candidates;

        if (ingest->parsed()) cmd_ingest(cfg);
        else if (curate->parsed()) cmd_curate(cfg);
        else if (aggregate->parsed()) cmd_aggregate(cfg);
        else if (analyze->parsed()) cmd_analyze(cfg);
        else if (evaluate->parsed()) cmd_evaluate(cfg);
        else if (inspect->parsed()) cmd_inspect(cfg, model_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "glyset: error: %s\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace glyset::cli
