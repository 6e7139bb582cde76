#include "glyset/errors.hpp"
#include "glyset/eval.hpp"
#include "glyset/rng.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <set>
#include <vector>

using namespace glyset;
using testsup::TempDir;

namespace {

std::vector<BinaryClass> alternating_labels(size_t n) {
    std::vector<BinaryClass> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? BinaryClass::UD : BinaryClass::HD;
    return y;
}

features::FeatureMatrix planted_matrix(size_t n, const std::vector<BinaryClass>& y,
                                       uint64_t seed) {
    features::FeatureMatrix x;
    rng::Rng rng(seed);
    x.column_names = {"f0", "f1"};
    x.column_kinds.assign(2, features::ColumnKind::Nutritional);
    x.standardizable.assign(2, true);
    for (size_t i = 0; i < n; ++i) {
        x.row_ids.push_back("r" + std::to_string(i));
        double sign = y[i] == BinaryClass::UD ? 1.0 : -1.0;
        x.data.push_back(sign * rng.uniform(1.0, 2.0));
        x.data.push_back(0.01 * rng.normal());
    }
    return x;
}

bool is_partition(const std::vector<eval::Fold>& folds, size_t n) {
    std::vector<bool> seen(n, false);
    for (const auto& f : folds) {
        for (size_t r : f.test) {
            if (r >= n || seen[r]) return false;
            seen[r] = true;
        }
        // Train is exactly the complement of the fold's test rows.
        std::set<size_t> train(f.train.begin(), f.train.end());
        if (train.size() + f.test.size() != n) return false;
        for (size_t r : f.test)
            if (train.count(r)) return false;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace

TEST_CASE("fold plans partition rows with balanced classes") {
    auto y = alternating_labels(24);
    auto plan = eval::make_fold_plan(y, 3);
    REQUIRE(plan.outer.size() == 5);
    CHECK(is_partition(plan.outer, 24));

    for (const auto& fold : plan.outer) {
        CHECK(fold.test.size() >= 4);
        CHECK(fold.test.size() <= 6);
        size_t ud = 0;
        for (size_t r : fold.test)
            if (y[r] == BinaryClass::UD) ++ud;
        // Twelve positives dealt over five folds: two or three each.
        CHECK(ud >= 2);
        CHECK(ud <= 3);
        CHECK(std::is_sorted(fold.train.begin(), fold.train.end()));
        CHECK(std::is_sorted(fold.test.begin(), fold.test.end()));
    }

    REQUIRE(plan.inner.size() == 5);
    for (size_t k = 0; k < 5; ++k) {
        const auto& outer_train = plan.outer[k].train;
        REQUIRE(plan.inner[k].size() == 5);
        // Inner test sets partition the outer training rows.
        std::set<size_t> covered;
        for (const auto& inner : plan.inner[k]) {
            for (size_t r : inner.test) {
                CHECK(std::binary_search(outer_train.begin(), outer_train.end(), r));
                CHECK(covered.insert(r).second);
            }
            for (size_t r : inner.train)
                CHECK(std::binary_search(outer_train.begin(), outer_train.end(), r));
            CHECK(inner.train.size() + inner.test.size() == outer_train.size());
        }
        CHECK(covered.size() == outer_train.size());
    }
}

TEST_CASE("fold plans are seed-deterministic") {
    auto y = alternating_labels(30);
    auto a = eval::make_fold_plan(y, 42);
    auto b = eval::make_fold_plan(y, 42);
    auto c = eval::make_fold_plan(y, 43);
    for (int k = 0; k < 5; ++k) {
        CHECK(a.outer[k].test == b.outer[k].test);
        CHECK(a.inner[k][0].test == b.inner[k][0].test);
    }
    bool any_difference = false;
    for (int k = 0; k < 5; ++k)
        if (a.outer[k].test != c.outer[k].test) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("fold plans reject classes too small to stratify") {
    std::vector<BinaryClass> y(20, BinaryClass::HD);
    y[0] = y[1] = y[2] = BinaryClass::UD;
    CHECK_THROWS_WITH_AS(eval::make_fold_plan(y, 1),
                         "make_fold_plan: class too small to stratify (UD=3, HD=17, folds=5)",
                         Error);
    CHECK_THROWS_WITH_AS(eval::make_fold_plan(alternating_labels(8), 1),
                         "make_fold_plan: need at least ten rows", Error);
}

TEST_CASE("metrics count the positive class") {
    using BC = BinaryClass;
    auto m = eval::compute_metrics({BC::UD, BC::UD, BC::HD, BC::HD, BC::UD},
                                   {BC::UD, BC::HD, BC::HD, BC::UD, BC::UD});
    CHECK(m.tp == 2);
    CHECK(m.fn == 1);
    CHECK(m.fp == 1);
    CHECK(m.tn == 1);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0));

    // Nothing predicted positive and nothing true: all ratios fall to zero.
    auto zero = eval::compute_metrics({BC::HD, BC::HD}, {BC::HD, BC::HD});
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);

    auto thresh = eval::metrics_at_threshold({0.9, 0.44, 0.45, 0.1},
                                             {BC::UD, BC::UD, BC::HD, BC::HD}, 0.45);
    CHECK(thresh.tp == 1);
    CHECK(thresh.fn == 1);
    CHECK(thresh.fp == 1);
    CHECK(thresh.tn == 1);
}

TEST_CASE("threshold grids score mean f1 per threshold") {
    using BC = BinaryClass;
    std::vector<std::pair<std::vector<double>, std::vector<BinaryClass>>> folds = {
        {{0.9, 0.5, 0.4}, {BC::UD, BC::HD, BC::HD}},
        {{0.6, 0.56, 0.3}, {BC::UD, BC::UD, BC::HD}},
    };
    auto points = eval::score_threshold_grid(1.0, folds, {0.45, 0.55});
    REQUIRE(points.size() == 2);
    CHECK(points[0].threshold == 0.45);
    CHECK(points[0].mean_f1 == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0).epsilon(1e-12));
    CHECK(points[1].threshold == 0.55);
    CHECK(points[1].mean_f1 == doctest::Approx(1.0).epsilon(1e-12));

    auto best = eval::select_grid_point(points);
    CHECK(best.threshold == 0.55);
}

TEST_CASE("grid selection breaks ties toward simpler settings") {
    using eval::GridPoint;
    // Equal score: the smaller C wins.
    auto p1 = eval::select_grid_point({{10.0, 0.5, 0.8}, {1.0, 0.5, 0.8}});
    CHECK(p1.c == 1.0);
    // Same C: the threshold nearest one half wins.
    auto p2 = eval::select_grid_point({{1.0, 0.48, 0.8}, {1.0, 0.51, 0.8}});
    CHECK(p2.threshold == 0.51);
    // Equidistant thresholds: the smaller one wins.
    auto p3 = eval::select_grid_point({{1.0, 0.55, 0.8}, {1.0, 0.45, 0.8}});
    CHECK(p3.threshold == 0.45);
    // A strictly better score beats every tie rule.
    auto p4 = eval::select_grid_point({{1000.0, 0.55, 0.9}, {0.01, 0.5, 0.8}});
    CHECK(p4.c == 1000.0);
    CHECK_THROWS_WITH_AS(eval::select_grid_point({}), "select_grid_point: no candidates", Error);
}

TEST_CASE("grid search evaluates the full grid and picks a deterministic winner") {
    auto y = alternating_labels(30);
    auto x = planted_matrix(30, y, 77);
    eval::FeatureBuilder builder = [&x](const std::vector<size_t>&) { return x; };

    auto plan = eval::make_fold_plan(y, 9);
    auto res = eval::grid_search(builder, y, plan.inner[0], {0.1, 10.0}, {0.45, 0.5});
    CHECK(res.evaluated.size() == 4);
    // Separable data scores perfectly everywhere, so the tie rules decide.
    CHECK(res.c == 0.1);
    CHECK(res.threshold == 0.5);

    eval::FeatureBuilder boom = [](const std::vector<size_t>&) -> features::FeatureMatrix {
        throw Error("boom");
    };
    CHECK_THROWS_WITH_AS(eval::grid_search(boom, y, plan.inner[0], {1.0}, {0.5}),
                         "inner fold 0: boom", Error);
    CHECK_THROWS_WITH_AS(eval::grid_search(builder, y, {}, {1.0}, {0.5}),
                         "grid_search: no folds", Error);
    CHECK_THROWS_WITH_AS(eval::grid_search(builder, y, plan.inner[0], {}, {0.5}),
                         "grid_search: empty grid", Error);
}

TEST_CASE("nested evaluation trains only on training rows") {
    auto y = alternating_labels(40);
    auto x = planted_matrix(40, y, 13);
    auto plan = eval::make_fold_plan(y, 21);

    // Record every row set the builder is asked to fit on.
    std::mutex mu;
    std::vector<std::vector<size_t>> calls;
    eval::FeatureBuilder recorder = [&](const std::vector<size_t>& train_rows) {
        {
            std::lock_guard<std::mutex> lock(mu);
            calls.push_back(train_rows);
        }
        return x;
    };

    auto report = eval::run_nested_cv({{"probe", recorder}}, y, plan, {1.0}, {0.5});
    REQUIRE(report.variants.size() == 1);
    CHECK(report.variants[0].error.empty());
    CHECK(report.variants[0].folds.size() == 5);

    // Every call must use one of the plan's training sets, never more.
    std::set<std::vector<size_t>> allowed;
    for (int k = 0; k < 5; ++k) {
        allowed.insert(plan.outer[k].train);
        for (const auto& inner : plan.inner[k]) allowed.insert(inner.train);
    }
    CHECK(calls.size() == 30); // five inner fits plus one refit per outer fold
    for (const auto& c : calls) CHECK(allowed.count(c) == 1);
}

TEST_CASE("nested evaluation scores separable data perfectly") {
    auto y = alternating_labels(40);
    auto x = planted_matrix(40, y, 55);
    eval::FeatureBuilder builder = [&x](const std::vector<size_t>&) { return x; };
    auto plan = eval::make_fold_plan(y, 2);

    auto report = eval::run_nested_cv({{"plant", builder}}, y, plan, {0.1, 10.0},
                                      {0.45, 0.5, 0.55});
    REQUIRE(report.variants.size() == 1);
    const auto& v = report.variants[0];
    CHECK(v.mean_f1 == doctest::Approx(1.0));
    CHECK(v.mean_precision == doctest::Approx(1.0));
    CHECK(v.mean_recall == doctest::Approx(1.0));
    for (const auto& f : v.folds) {
        CHECK(f.metrics.f1 == doctest::Approx(1.0));
        CHECK(f.model.feature_set == "plant");
        CHECK(f.model.fold == f.fold);
        CHECK(f.model.columns == x.column_names);
        CHECK(f.c == f.model.C);
        CHECK(f.threshold == f.model.threshold);
    }
}

TEST_CASE("a failing variant is isolated from the others") {
    auto y = alternating_labels(30);
    auto x = planted_matrix(30, y, 3);
    eval::FeatureBuilder good = [&x](const std::vector<size_t>&) { return x; };
    eval::FeatureBuilder bad = [](const std::vector<size_t>&) -> features::FeatureMatrix {
        throw Error("boom");
    };
    auto plan = eval::make_fold_plan(y, 8);

    testsup::LogCapture capture;
    auto report =
        eval::run_nested_cv({{"bad", bad}, {"good", good}}, y, plan, {1.0}, {0.5});
    REQUIRE(report.variants.size() == 2);
    CHECK(report.variants[0].name == "bad");
    CHECK(report.variants[0].error.find("boom") != std::string::npos);
    CHECK(report.variants[0].error.find("outer fold") == 0);
    CHECK(report.variants[0].folds.empty());
    CHECK(report.variants[1].error.empty());
    CHECK(report.variants[1].folds.size() == 5);
    CHECK(capture.contains("variant bad aborted"));

    // With only one completed variant there is nothing to compare.
    auto cmp = eval::compare_variants(report);
    CHECK(cmp.note == "comparison skipped: fewer than two completed variants");
}

TEST_CASE("flipping held-out labels changes neither tuning nor the fitted model") {
    const size_t n = 24;
    auto y = alternating_labels(n);
    auto plan = eval::make_fold_plan(y, 5);

    // Count-style features tied to the class plus seeded noise, so the
    // builder's label-dependent weighting matters.
    features::FeatureMatrix counts;
    rng::Rng rng(66);
    for (size_t c = 0; c < 6; ++c) counts.column_names.push_back("bow:t" + std::to_string(c));
    counts.column_kinds.assign(6, features::ColumnKind::Count);
    counts.standardizable.assign(6, true);
    for (size_t i = 0; i < n; ++i) {
        counts.row_ids.push_back("r" + std::to_string(i));
        for (size_t c = 0; c < 6; ++c) {
            double base = static_cast<double>(rng.bounded(3));
            if (c == 0 && y[i] == BinaryClass::UD) base += 2.0;
            if (c == 1 && y[i] == BinaryClass::HD) base += 2.0;
            counts.data.push_back(base);
        }
    }

    auto make_variant = [&counts](const std::vector<BinaryClass>& labels) {
        return eval::VariantSpec{
            "nbish", [&counts, labels](const std::vector<size_t>& train_rows) {
                auto w = features::fit_nb_weights(counts, train_rows, labels);
                return features::apply_nb_weights(counts, w);
            }};
    };

    auto flipped = y;
    for (size_t r : plan.outer[0].test)
        flipped[r] = flipped[r] == BinaryClass::UD ? BinaryClass::HD : BinaryClass::UD;

    auto report_a = eval::run_nested_cv({make_variant(y)}, y, plan, {0.1, 1.0, 10.0},
                                        {0.45, 0.5, 0.55});
    auto report_b = eval::run_nested_cv({make_variant(flipped)}, flipped, plan,
                                        {0.1, 1.0, 10.0}, {0.45, 0.5, 0.55});
    REQUIRE(report_a.variants[0].folds.size() == 5);
    REQUIRE(report_b.variants[0].folds.size() == 5);

    const auto& fa = report_a.variants[0].folds[0];
    const auto& fb = report_b.variants[0].folds[0];
    CHECK(fa.c == fb.c);
    CHECK(fa.threshold == fb.threshold);
    REQUIRE(fa.model.weights.size() == fb.model.weights.size());
    CHECK(std::memcmp(fa.model.weights.data(), fb.model.weights.data(),
                      fa.model.weights.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(&fa.model.bias, &fb.model.bias, sizeof(double)) == 0);

    // Fitted class-conditional weights on the first outer training set are
    // equally untouched by the held-out flip.
    auto wa = features::fit_nb_weights(counts, plan.outer[0].train, y);
    auto wb = features::fit_nb_weights(counts, plan.outer[0].train, flipped);
    CHECK(std::memcmp(wa.r.data(), wb.r.data(), wa.r.size() * sizeof(double)) == 0);
}

TEST_CASE("variant comparison flags clear separations") {
    auto fold_results = [](std::vector<double> f1s) {
        std::vector<eval::FoldResult> folds;
        double sum = 0.0;
        for (size_t i = 0; i < f1s.size(); ++i) {
            eval::FoldResult f;
            f.fold = static_cast<int>(i);
            f.metrics.f1 = f1s[i];
            folds.push_back(f);
            sum += f1s[i];
        }
        return folds;
    };

    eval::EvalReport report;
    eval::VariantResult a, b, c;
    a.name = "A";
    a.folds = fold_results({0.90, 0.92, 0.91, 0.93, 0.90});
    a.mean_f1 = 0.912;
    b.name = "B";
    b.folds = fold_results({0.40, 0.42, 0.41, 0.43, 0.40});
    b.mean_f1 = 0.412;
    c.name = "C";
    c.folds = fold_results({0.48, 0.50, 0.49, 0.51, 0.52});
    c.mean_f1 = 0.50;
    report.variants = {a, b, c};

    auto cmp = eval::compare_variants(report, 0.05);
    CHECK(cmp.note.empty());
    CHECK(cmp.best_variant == "A");
    CHECK(cmp.kw_p < 0.05);
    REQUIRE(cmp.pairwise.size() == 2);
    for (const auto& pc : cmp.pairwise) {
        CHECK(pc.group_a == "A");
        CHECK(pc.adjusted_p == doctest::Approx(std::min(1.0, pc.p * 2.0)).epsilon(1e-12));
    }
    // A clearly beats B; the separation from C is too small for the
    // family-wise level.
    REQUIRE(cmp.flagged.size() == 1);
    CHECK(cmp.flagged[0] == "A vs B");

    // Identical scores everywhere cannot be ranked.
    eval::EvalReport flat;
    auto d = a;
    d.folds = fold_results({0.8, 0.8, 0.8, 0.8, 0.8});
    auto e = b;
    e.folds = fold_results({0.8, 0.8, 0.8, 0.8, 0.8});
    flat.variants = {d, e};
    auto skipped = eval::compare_variants(flat);
    CHECK(skipped.note == "comparison skipped: degenerate ranks: all values identical");
}

TEST_CASE("reports export to csv and json") {
    TempDir dir;
    eval::EvalReport report;
    eval::VariantResult ok;
    ok.name = "nu";
    eval::FoldResult f0;
    f0.fold = 0;
    f0.metrics = {1.0, 1.0, 1.0, 2, 0, 0, 2};
    f0.c = 1.0;
    f0.threshold = 0.5;
    eval::FoldResult f1;
    f1.fold = 1;
    f1.metrics = {0.5, 1.0, 2.0 / 3.0, 1, 1, 0, 2};
    f1.c = 10.0;
    f1.threshold = 0.45;
    ok.folds = {f0, f1};
    ok.mean_precision = 0.75;
    ok.mean_recall = 1.0;
    ok.mean_f1 = (1.0 + 2.0 / 3.0) / 2.0;

    eval::VariantResult broken;
    broken.name = "emb";
    broken.error = "outer fold 2: boom";

    report.variants = {ok, broken};
    report.significance.note = "comparison skipped: fewer than two completed variants";

    auto csv_path = dir / "report.csv";
    eval::write_report_csv(report, csv_path);
    CHECK(testsup::read_file(csv_path) ==
          "variant,fold,precision,recall,F1,C,threshold\n"
          "nu,0,1,1,1,1,0.5\n"
          "nu,1,0.5,1,0.6666666666666666,10,0.45\n");

    auto json_path = dir / "report.json";
    eval::write_report_json(report, json_path);
    auto j = nlohmann::json::parse(testsup::read_file(json_path));
    REQUIRE(j["variants"].size() == 2);
    CHECK(j["variants"][0]["name"] == "nu");
    CHECK(j["variants"][0]["mean_f1"].get<double>() ==
          doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
    CHECK(j["variants"][0]["folds"].size() == 2);
    CHECK(j["variants"][1]["error"] == "outer fold 2: boom");
    CHECK(j["significance"]["note"] ==
          "comparison skipped: fewer than two completed variants");
}
