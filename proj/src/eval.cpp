#include "glyset/eval.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"
#include "glyset/log.hpp"
#include "glyset/parallel.hpp"
#include "glyset/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace glyset::eval {

namespace {

// Deal each class's shuffled rows round-robin across folds; fold k's test
// set is what it was dealt, its train set is everything else.
std::vector<Fold> stratified_folds(const std::vector<size_t>& rows,
                                   const std::vector<BinaryClass>& labels, int n_folds,
                                   rng::Rng& rng) {
    std::vector<std::vector<size_t>> per_class(2);
    for (size_t r : rows) per_class[labels[r] == BinaryClass::UD ? 0 : 1].push_back(r);

    std::vector<Fold> folds(static_cast<size_t>(n_folds));
    for (auto& cls : per_class) {
        std::sort(cls.begin(), cls.end());
        rng.shuffle(cls);
        for (size_t j = 0; j < cls.size(); ++j) {
            folds[j % static_cast<size_t>(n_folds)].test.push_back(cls[j]);
        }
    }
    for (auto& f : folds) {
        std::sort(f.test.begin(), f.test.end());
        std::set<size_t> in_test(f.test.begin(), f.test.end());
        for (size_t r : rows) {
            if (!in_test.count(r)) f.train.push_back(r);
        }
        std::sort(f.train.begin(), f.train.end());
    }
    return folds;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

FoldPlan make_fold_plan(const std::vector<BinaryClass>& labels, uint64_t seed,
                        int outer_folds, int inner_folds) {
    if (outer_folds < 2 || inner_folds < 2) throw Error("make_fold_plan: need at least two folds");
    if (labels.size() < 10) throw Error("make_fold_plan: need at least ten rows");
    size_t n_ud = 0;
    for (auto c : labels) n_ud += (c == BinaryClass::UD);
    size_t n_hd = labels.size() - n_ud;
    if (n_ud < static_cast<size_t>(outer_folds) || n_hd < static_cast<size_t>(outer_folds)) {
        throw Error("make_fold_plan: class too small to stratify (UD=" + std::to_string(n_ud) +
                    ", HD=" + std::to_string(n_hd) + ", folds=" + std::to_string(outer_folds) +
                    ")");
    }

    FoldPlan plan;
    plan.seed = seed;
    std::vector<size_t> all_rows(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) all_rows[i] = i;

    rng::Rng outer_rng(rng::substream(seed, "outer"));
    plan.outer = stratified_folds(all_rows, labels, outer_folds, outer_rng);

    plan.inner.resize(plan.outer.size());
    for (size_t i = 0; i < plan.outer.size(); ++i) {
        rng::Rng inner_rng(rng::substream(seed, "inner:" + std::to_string(i)));
        plan.inner[i] = stratified_folds(plan.outer[i].train, labels, inner_folds, inner_rng);
    }
    return plan;
}

Metrics compute_metrics(const std::vector<BinaryClass>& truth,
                        const std::vector<BinaryClass>& pred) {
    if (truth.size() != pred.size()) throw Error("compute_metrics: size mismatch");
    Metrics m;
    for (size_t i = 0; i < truth.size(); ++i) {
        bool pos_true = truth[i] == BinaryClass::UD;
        bool pos_pred = pred[i] == BinaryClass::UD;
        if (pos_true && pos_pred) ++m.tp;
        else if (!pos_true && pos_pred) ++m.fp;
        else if (pos_true && !pos_pred) ++m.fn;
        else ++m.tn;
    }
    m.precision = (m.tp + m.fp) ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = (m.tp + m.fn) ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

Metrics metrics_at_threshold(const std::vector<double>& probs,
                             const std::vector<BinaryClass>& truth, double threshold) {
    if (probs.size() != truth.size()) throw Error("metrics_at_threshold: size mismatch");
    std::vector<BinaryClass> pred(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        pred[i] = probs[i] >= threshold ? BinaryClass::UD : BinaryClass::HD;
    }
    return compute_metrics(truth, pred);
}

std::vector<GridPoint> score_threshold_grid(
    double c,
    const std::vector<std::pair<std::vector<double>, std::vector<BinaryClass>>>& fold_outputs,
    const std::vector<double>& threshold_grid) {
    std::vector<GridPoint> points;
    points.reserve(threshold_grid.size());
    for (double t : threshold_grid) {
        std::vector<double> f1s;
        f1s.reserve(fold_outputs.size());
        for (const auto& [probs, truth] : fold_outputs) {
            f1s.push_back(metrics_at_threshold(probs, truth, t).f1);
        }
        points.push_back({c, t, mean_of(f1s)});
    }
    return points;
}

GridPoint select_grid_point(const std::vector<GridPoint>& points) {
    if (points.empty()) throw Error("select_grid_point: no candidates");
    const GridPoint* best = &points[0];
    for (const auto& p : points) {
        if (p.mean_f1 > best->mean_f1) { best = &p; continue; }
        if (p.mean_f1 < best->mean_f1) continue;
        if (p.c < best->c) { best = &p; continue; }
        if (p.c > best->c) continue;
        double d_p = std::abs(p.threshold - 0.5), d_b = std::abs(best->threshold - 0.5);
        if (d_p < d_b || (d_p == d_b && p.threshold < best->threshold)) best = &p;
    }
    return *best;
}

GridSearchResult grid_search(const FeatureBuilder& builder,
                             const std::vector<BinaryClass>& labels,
                             const std::vector<Fold>& inner_folds,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& threshold_grid,
                             const classifier::LrOptions& opts) {
    if (c_grid.empty() || threshold_grid.empty()) throw Error("grid_search: empty grid");
    if (inner_folds.empty()) throw Error("grid_search: no folds");

    // fold_outputs[c][fold] = (validation probabilities, validation truth)
    std::vector<std::vector<std::pair<std::vector<double>, std::vector<BinaryClass>>>>
        fold_outputs(c_grid.size());

    for (size_t fi = 0; fi < inner_folds.size(); ++fi) {
        const Fold& fold = inner_folds[fi];
        features::FeatureMatrix x;
        try {
            x = builder(fold.train);
        } catch (const std::exception& e) {
            throw Error("inner fold " + std::to_string(fi) + ": " + e.what());
        }
        std::vector<BinaryClass> truth;
        truth.reserve(fold.test.size());
        for (size_t r : fold.test) truth.push_back(labels[r]);
        for (size_t ci = 0; ci < c_grid.size(); ++ci) {
            classifier::TrainedClassifier model;
            try {
                model = classifier::train_lr(x, fold.train, labels, c_grid[ci], opts);
            } catch (const std::exception& e) {
                throw Error("inner fold " + std::to_string(fi) + ", C=" +
                            csv::format_double(c_grid[ci]) + ": " + e.what());
            }
            auto all_probs = classifier::predict_proba(model, x);
            std::vector<double> probs;
            probs.reserve(fold.test.size());
            for (size_t r : fold.test) probs.push_back(all_probs[r]);
            fold_outputs[ci].emplace_back(std::move(probs), truth);
        }
    }

    GridSearchResult result;
    for (size_t ci = 0; ci < c_grid.size(); ++ci) {
        auto pts = score_threshold_grid(c_grid[ci], fold_outputs[ci], threshold_grid);
        result.evaluated.insert(result.evaluated.end(), pts.begin(), pts.end());
    }
    GridPoint best = select_grid_point(result.evaluated);
    result.c = best.c;
    result.threshold = best.threshold;
    return result;
}

EvalReport run_nested_cv(const std::vector<VariantSpec>& variants,
                         const std::vector<BinaryClass>& labels, const FoldPlan& plan,
                         const std::vector<double>& c_grid,
                         const std::vector<double>& threshold_grid,
                         const classifier::LrOptions& opts, int jobs) {
    if (variants.empty()) throw Error("run_nested_cv: no variants");
    const size_t n_outer = plan.outer.size();

    struct Slot {
        FoldResult result;
        std::string error;
    };
    std::vector<Slot> slots(variants.size() * n_outer);

    parallel_for(slots.size(), jobs, [&](size_t task) {
        const size_t vi = task / n_outer;
        const size_t fi = task % n_outer;
        Slot& slot = slots[task];
        slot.result.fold = static_cast<int>(fi);
        try {
            auto grid = grid_search(variants[vi].builder, labels, plan.inner[fi], c_grid,
                                    threshold_grid, opts);
            auto x = variants[vi].builder(plan.outer[fi].train);
            auto model = classifier::train_lr(x, plan.outer[fi].train, labels, grid.c, opts);
            model.threshold = grid.threshold;
            model.fold = static_cast<int>(fi);
            model.feature_set = variants[vi].name;

            auto all_probs = classifier::predict_proba(model, x);
            std::vector<double> probs;
            std::vector<BinaryClass> truth;
            for (size_t r : plan.outer[fi].test) {
                probs.push_back(all_probs[r]);
                truth.push_back(labels[r]);
            }
            slot.result.metrics = metrics_at_threshold(probs, truth, grid.threshold);
            slot.result.c = grid.c;
            slot.result.threshold = grid.threshold;
            slot.result.model = std::move(model);
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    EvalReport report;
    for (size_t vi = 0; vi < variants.size(); ++vi) {
        VariantResult vr;
        vr.name = variants[vi].name;
        for (size_t fi = 0; fi < n_outer; ++fi) {
            Slot& slot = slots[vi * n_outer + fi];
            if (!slot.error.empty()) {
                vr.error = "outer fold " + std::to_string(fi) + ": " + slot.error;
                log::warn("variant " + vr.name + " aborted: " + vr.error);
                break;
            }
            vr.folds.push_back(std::move(slot.result));
        }
        if (vr.error.empty()) {
            std::vector<double> ps, rs, fs;
            for (const auto& f : vr.folds) {
                ps.push_back(f.metrics.precision);
                rs.push_back(f.metrics.recall);
                fs.push_back(f.metrics.f1);
            }
            vr.mean_precision = mean_of(ps);
            vr.mean_recall = mean_of(rs);
            vr.mean_f1 = mean_of(fs);
        } else {
            vr.folds.clear();
        }
        report.variants.push_back(std::move(vr));
    }
    return report;
}

VariantComparison compare_variants(const EvalReport& report, double alpha) {
    VariantComparison cmp;
    std::vector<stats::Sample> groups;
    for (const auto& v : report.variants) {
        if (!v.error.empty()) continue;
        stats::Sample s;
        s.group_id = v.name;
        for (const auto& f : v.folds) s.values.push_back(f.metrics.f1);
        groups.push_back(std::move(s));
    }
    if (groups.size() < 2) {
        cmp.note = "comparison skipped: fewer than two completed variants";
        return cmp;
    }

    double best_mean = -1.0;
    for (const auto& v : report.variants) {
        if (!v.error.empty()) continue;
        if (v.mean_f1 > best_mean) {
            best_mean = v.mean_f1;
            cmp.best_variant = v.name;
        }
    }

    try {
        auto kw = stats::kruskal_wallis(groups);
        cmp.kw_statistic = kw.statistic;
        cmp.kw_p = kw.p_value;
    } catch (const Error& e) {
        cmp.note = std::string("comparison skipped: ") + e.what();
        return cmp;
    }

    auto all_pairs = stats::dunn_test(groups, stats::Adjustment::None);
    double n_comparisons = static_cast<double>(groups.size() - 1);
    for (auto& pc : all_pairs) {
        if (pc.group_a != cmp.best_variant && pc.group_b != cmp.best_variant) continue;
        pc.adjusted_p = std::min(1.0, pc.p * n_comparisons);
        if (pc.adjusted_p < alpha) {
            cmp.flagged.push_back(pc.group_a + " vs " + pc.group_b);
        }
        cmp.pairwise.push_back(pc);
    }
    return cmp;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    csv::write_row(out, {"variant", "fold", "precision", "recall", "F1", "C", "threshold"});
    for (const auto& v : report.variants) {
        if (!v.error.empty()) continue;
        for (const auto& f : v.folds) {
            csv::write_row(out, {v.name, std::to_string(f.fold),
                                   csv::format_double(f.metrics.precision),
                                   csv::format_double(f.metrics.recall),
                                   csv::format_double(f.metrics.f1),
                                   csv::format_double(f.c),
                                   csv::format_double(f.threshold)});
        }
    }
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["variants"] = nlohmann::json::array();
    for (const auto& v : report.variants) {
        nlohmann::json jv;
        jv["name"] = v.name;
        if (!v.error.empty()) {
            jv["error"] = v.error;
        } else {
            jv["mean_precision"] = v.mean_precision;
            jv["mean_recall"] = v.mean_recall;
            jv["mean_f1"] = v.mean_f1;
            jv["folds"] = nlohmann::json::array();
            for (const auto& f : v.folds) {
                jv["folds"].push_back({{"fold", f.fold},
                                       {"precision", f.metrics.precision},
                                       {"recall", f.metrics.recall},
                                       {"f1", f.metrics.f1},
                                       {"C", f.c},
                                       {"threshold", f.threshold}});
            }
        }
        j["variants"].push_back(std::move(jv));
    }
    const auto& s = report.significance;
    nlohmann::json js;
    if (!s.note.empty()) js["note"] = s.note;
    if (!s.best_variant.empty()) js["best_variant"] = s.best_variant;
    if (s.note.empty() && !s.best_variant.empty()) {
        js["kruskal_wallis"] = {{"statistic", s.kw_statistic}, {"p", s.kw_p}};
        js["pairwise"] = nlohmann::json::array();
        for (const auto& pc : s.pairwise) {
            js["pairwise"].push_back({{"a", pc.group_a},
                                      {"b", pc.group_b},
                                      {"z", pc.z},
                                      {"p", pc.p},
                                      {"adjusted_p", pc.adjusted_p}});
        }
        js["flagged"] = s.flagged;
    }
    j["significance"] = std::move(js);

    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace glyset::eval
