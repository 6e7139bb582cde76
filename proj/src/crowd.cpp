#include "glyset/crowd.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

namespace glyset::crowd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int parse_rating(const std::string& s) {
    if (s == "NS") return kNotSure;
    if (s.size() == 1 && s[0] >= '1' && s[0] <= '5') return s[0] - '0';
    throw Error("invalid rating: " + s);
}

std::string rating_to_string(int rating) {
    return rating == kNotSure ? "NS" : std::to_string(rating);
}

} // namespace

JudgmentSet JudgmentSet::build(std::vector<Judgment> judgments) {
    JudgmentSet js;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& j : judgments) {
        if (j.rating != kNotSure && (j.rating < 1 || j.rating > 5)) {
            throw Error("invalid rating for recipe " + j.recipe_id);
        }
        if (!seen.emplace(j.worker_id, j.recipe_id).second) {
            throw Error("duplicate judgment: worker " + j.worker_id + ", recipe " + j.recipe_id);
        }
    }
    js.judgments_ = std::move(judgments);

    std::set<std::string> recipes, workers;
    for (const auto& j : js.judgments_) {
        recipes.insert(j.recipe_id);
        workers.insert(j.worker_id);
    }
    js.recipe_ids_.assign(recipes.begin(), recipes.end());
    js.worker_ids_.assign(workers.begin(), workers.end());

    std::unordered_map<std::string, size_t> rpos;
    for (size_t i = 0; i < js.recipe_ids_.size(); ++i) rpos[js.recipe_ids_[i]] = i;
    js.by_recipe_.resize(js.recipe_ids_.size());
    for (size_t k = 0; k < js.judgments_.size(); ++k) {
        js.by_recipe_[rpos[js.judgments_[k].recipe_id]].push_back(k);
    }
    return js;
}

JudgmentSet load_judgments_csv(const std::filesystem::path& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw Error("empty judgments file: " + path.string());
    const std::vector<std::string> header = {"worker_id", "recipe_id", "rating"};
    if (rows[0] != header) throw Error("judgments file must start with header worker_id,recipe_id,rating");
    std::vector<Judgment> out;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw Error("malformed judgments row " + std::to_string(i + 1));
        out.push_back({rows[i][0], rows[i][1], parse_rating(rows[i][2])});
    }
    return JudgmentSet::build(std::move(out));
}

double krippendorff_alpha(const JudgmentSet& js, AlphaMetric metric) {
    // Values 1..5; not-sure is missing data.
    constexpr int V = 5;
    double o[V][V] = {};
    bool any_pairable = false;
    for (const auto& unit : js.by_recipe()) {
        std::vector<int> vals;
        for (size_t k : unit) {
            int r = js.judgments()[k].rating;
            if (r != kNotSure) vals.push_back(r);
        }
        size_t m = vals.size();
        if (m < 2) continue;
        any_pairable = true;
        double w = 1.0 / static_cast<double>(m - 1);
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) {
                if (i != j) o[vals[i] - 1][vals[j] - 1] += w;
            }
        }
    }
    if (!any_pairable) throw Error("no overlap: no recipe has two or more ratings");

    double marg[V] = {};
    double n = 0.0;
    int distinct = 0;
    for (int c = 0; c < V; ++c) {
        for (int k = 0; k < V; ++k) marg[c] += o[c][k];
        n += marg[c];
        if (marg[c] > 0.0) ++distinct;
    }
    if (distinct < 2) throw Error("degenerate data: a single rating value everywhere");

    auto diff2 = [&](int c, int k) {
        if (metric == AlphaMetric::Interval) {
            double d = static_cast<double>(c - k);
            return d * d;
        }
        // Ordinal: cumulative marginals between the two values.
        int lo = std::min(c, k), hi = std::max(c, k);
        double s = 0.0;
        for (int g = lo; g <= hi; ++g) s += marg[g];
        s -= (marg[c] + marg[k]) / 2.0;
        return s * s;
    };

    double d_obs = 0.0, d_exp = 0.0;
    for (int c = 0; c < V; ++c) {
        for (int k = c + 1; k < V; ++k) {
            double d2 = diff2(c, k);
            d_obs += o[c][k] * d2;
            d_exp += marg[c] * marg[k] * d2;
        }
    }
    if (d_obs == 0.0) return 1.0;
    return 1.0 - (n - 1.0) * d_obs / d_exp;
}

DawidSkeneResult dawid_skene(const JudgmentSet& js, const DawidSkeneOptions& opts) {
    const size_t n = js.recipe_ids().size();
    if (n == 0) throw Error("empty judgment set");
    const size_t W = js.worker_ids().size();
    constexpr int K = kNumClasses;

    std::unordered_map<std::string, size_t> wpos;
    for (size_t w = 0; w < W; ++w) wpos[js.worker_ids()[w]] = w;

    // (worker, observed class) per recipe, in fixed recipe-id order.
    std::vector<std::vector<std::pair<size_t, int>>> votes(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k : js.by_recipe()[i]) {
            const auto& j = js.judgments()[k];
            int cls = j.rating == kNotSure ? K - 1 : j.rating - 1;
            votes[i].emplace_back(wpos.at(j.worker_id), cls);
        }
        std::sort(votes[i].begin(), votes[i].end());
    }

    // Posteriors initialized from normalized vote counts.
    std::vector<std::array<double, K>> post(n);
    for (size_t i = 0; i < n; ++i) {
        post[i].fill(0.0);
        for (const auto& [w, c] : votes[i]) post[i][c] += 1.0;
        double tot = static_cast<double>(votes[i].size());
        for (int c = 0; c < K; ++c) post[i][c] /= tot;
    }

    std::array<double, K> priors{};
    std::vector<std::array<std::array<double, K>, K>> pi(W);
    DawidSkeneResult result;
    const double s = opts.smoothing;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        // M-step: class priors and row-stochastic confusion matrices.
        priors.fill(0.0);
        for (size_t i = 0; i < n; ++i) {
            for (int c = 0; c < K; ++c) priors[c] += post[i][c];
        }
        for (int c = 0; c < K; ++c) priors[c] /= static_cast<double>(n);

        for (size_t w = 0; w < W; ++w) {
            for (int c = 0; c < K; ++c) pi[w][c].fill(s);
        }
        for (size_t i = 0; i < n; ++i) {
            for (const auto& [w, obs] : votes[i]) {
                for (int c = 0; c < K; ++c) pi[w][c][obs] += post[i][c];
            }
        }
        for (size_t w = 0; w < W; ++w) {
            for (int c = 0; c < K; ++c) {
                double row = 0.0;
                for (int obsc = 0; obsc < K; ++obsc) row += pi[w][c][obsc];
                for (int obsc = 0; obsc < K; ++obsc) pi[w][c][obsc] /= row;
            }
        }

        // E-step in log space, plus both likelihood traces.
        double loglik = 0.0;
        double max_delta = 0.0;
        for (size_t i = 0; i < n; ++i) {
            std::array<double, K> lp;
            for (int c = 0; c < K; ++c) {
                double v = priors[c] > 0.0 ? std::log(priors[c]) : kNegInf;
                for (const auto& [w, obs] : votes[i]) {
                    v += std::log(pi[w][c][obs]);
                }
                lp[c] = v;
            }
            double mx = *std::max_element(lp.begin(), lp.end());
            double z = 0.0;
            for (int c = 0; c < K; ++c) z += std::exp(lp[c] - mx);
            loglik += mx + std::log(z);
            for (int c = 0; c < K; ++c) {
                double p = std::exp(lp[c] - mx) / z;
                max_delta = std::max(max_delta, std::abs(p - post[i][c]));
                post[i][c] = p;
            }
        }
        double penalty = 0.0;
        for (size_t w = 0; w < W; ++w) {
            for (int c = 0; c < K; ++c) {
                for (int obsc = 0; obsc < K; ++obsc) penalty += std::log(pi[w][c][obsc]);
            }
        }
        result.loglik_trace.push_back(loglik);
        result.objective_trace.push_back(loglik + s * penalty);
        result.iterations = iter + 1;
        if (max_delta < opts.tol) {
            result.converged = true;
            break;
        }
    }

    result.class_priors = priors;
    for (size_t w = 0; w < W; ++w) result.worker_confusion[js.worker_ids()[w]] = pi[w];
    result.labels.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        AggregatedLabel al;
        al.recipe_id = js.recipe_ids()[i];
        al.posterior = post[i];
        // Argmax; ties resolve to the lower rating (not-sure last).
        int best = 0;
        for (int c = 1; c < K; ++c) {
            if (post[i][c] > post[i][best]) best = c;
        }
        al.label = best == K - 1 ? kNotSure : best + 1;
        result.labels.push_back(std::move(al));
    }
    return result;
}

BinarizeResult binarize(const std::vector<AggregatedLabel>& labels) {
    BinarizeResult out;
    for (const auto& al : labels) {
        if (al.label == kNotSure) {
            ++out.excluded;
        } else if (al.label <= 3) {
            out.labels.push_back({al.recipe_id, BinaryClass::UD});
        } else {
            out.labels.push_back({al.recipe_id, BinaryClass::HD});
        }
    }
    return out;
}

void write_aggregated_csv(const std::vector<AggregatedLabel>& labels,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write labels file: " + path.string());
    csv::write_row(out, {"recipe_id", "label", "p1", "p2", "p3", "p4", "p5", "pNS"});
    for (const auto& al : labels) {
        std::vector<std::string> row = {al.recipe_id, rating_to_string(al.label)};
        for (double p : al.posterior) row.push_back(csv::format_double(p));
        csv::write_row(out, row);
    }
}

std::vector<AggregatedLabel> load_aggregated_csv(const std::filesystem::path& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw Error("empty labels file: " + path.string());
    std::vector<AggregatedLabel> out;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 8) throw Error("malformed labels row " + std::to_string(i + 1));
        AggregatedLabel al;
        al.recipe_id = rows[i][0];
        al.label = parse_rating(rows[i][1]);
        for (int c = 0; c < kNumClasses; ++c) al.posterior[c] = std::stod(rows[i][2 + c]);
        out.push_back(std::move(al));
    }
    return out;
}

void write_binary_labels_csv(const std::vector<BinaryLabel>& labels,
                             const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write labels file: " + path.string());
    csv::write_row(out, {"recipe_id", "class"});
    for (const auto& bl : labels) csv::write_row(out, {bl.recipe_id, to_string(bl.cls)});
}

std::vector<BinaryLabel> load_binary_labels_csv(const std::filesystem::path& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw Error("empty labels file: " + path.string());
    std::vector<BinaryLabel> out;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw Error("malformed labels row " + std::to_string(i + 1));
        out.push_back({rows[i][0], binary_class_from_string(rows[i][1])});
    }
    return out;
}

} // namespace glyset::crowd
