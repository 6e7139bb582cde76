#include "glyset/corpus.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"
#include "glyset/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace glyset::corpus {

using nlohmann::json;

const std::vector<std::string> kRequiredNutrients = {
    "fat", "saturated_fat", "carbohydrates", "sugars", "fiber", "protein", "sodium"};

bool is_energy_key(const std::string& name) {
    return name == "calories" || name == "energy";
}

const char* to_string(SfPartition p) {
    switch (p) {
        case SfPartition::Low: return "LOW";
        case SfPartition::Mid: return "MID";
        default: return "HIGH";
    }
}

std::string validate(const Recipe& r) {
    if (r.ingredients.size() < 2) return "fewer than two ingredients";
    if (r.directions.size() < 2) return "fewer than two directions";
    for (const auto& [name, amount] : r.nutrients) {
        if (!std::isfinite(amount)) return "non-finite nutrient";
        if (amount < 0.0) return "negative nutrient";
    }
    for (const auto& name : kRequiredNutrients) {
        if (!r.nutrients.count(name)) return "missing required nutrient: " + name;
    }
    return {};
}

namespace {

std::string parse_recipe_line(const std::string& line, Recipe& out) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return "invalid JSON";
    if (!j.is_object()) return "invalid JSON";

    auto str_field = [&](const char* name, std::string& dst) -> bool {
        auto it = j.find(name);
        if (it == j.end() || !it->is_string()) return false;
        dst = it->get<std::string>();
        return true;
    };
    auto strlist_field = [&](const char* name, std::vector<std::string>& dst) -> bool {
        auto it = j.find(name);
        if (it == j.end() || !it->is_array()) return false;
        for (const auto& e : *it) {
            if (!e.is_string()) return false;
            dst.push_back(e.get<std::string>());
        }
        return true;
    };

    if (!str_field("id", out.id)) return "missing or invalid field: id";
    if (!str_field("title", out.title)) return "missing or invalid field: title";
    if (!strlist_field("ingredients", out.ingredients)) return "missing or invalid field: ingredients";
    if (!strlist_field("directions", out.directions)) return "missing or invalid field: directions";

    auto nut = j.find("nutrients");
    if (nut == j.end() || !nut->is_object()) return "missing or invalid field: nutrients";
    for (auto it = nut->begin(); it != nut->end(); ++it) {
        if (!it.value().is_number()) return "missing or invalid field: nutrients";
        out.nutrients[it.key()] = it.value().get<double>();
    }

    auto tags = j.find("category_tags");
    if (tags != j.end()) {
        if (!tags->is_array()) return "missing or invalid field: category_tags";
        for (const auto& e : *tags) {
            if (!e.is_string()) return "missing or invalid field: category_tags";
            out.category_tags.insert(e.get<std::string>());
        }
    }
    return validate(out);
}

} // namespace

LoadResult load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read corpus file: " + path.string());

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Recipe r;
        std::string reason = parse_recipe_line(line, r);
        if (reason.empty() && !seen_ids.insert(r.id).second) reason = "duplicate id";
        if (!reason.empty()) {
            result.rejections.push_back({line_no, reason});
            continue;
        }
        result.recipes.push_back(std::move(r));
        result.lines.push_back(line_no);
    }
    return result;
}

std::string to_json_line(const Recipe& r) {
    json j;
    j["id"] = r.id;
    j["title"] = r.title;
    j["ingredients"] = r.ingredients;
    j["directions"] = r.directions;
    j["nutrients"] = r.nutrients;
    j["category_tags"] = std::vector<std::string>(r.category_tags.begin(), r.category_tags.end());
    return j.dump();
}

void save_corpus(const std::vector<Recipe>& recipes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write corpus file: " + path.string());
    for (const auto& r : recipes) out << to_json_line(r) << '\n';
}

void write_rejections_csv(const std::vector<RejectionRecord>& rejections,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write rejections file: " + path.string());
    csv::write_row(out, {"line", "reason"});
    for (const auto& rec : rejections) {
        csv::write_row(out, {std::to_string(rec.line), rec.reason});
    }
}

DerivedNutrition derive_nutrition(const Recipe& r) {
    DerivedNutrition d;
    for (const auto& [name, amount] : r.nutrients) {
        if (!is_energy_key(name)) d.dry_weight += amount;
    }
    if (d.dry_weight <= 0.0) throw Error("zero dry weight: " + r.id);
    for (const auto& [name, amount] : r.nutrients) {
        double norm = amount / d.dry_weight;
        d.normalized[name] = norm;
        d.per_100g[name] = 100.0 * norm;
    }
    double sugars = r.nutrients.at("sugars");
    double fiber = r.nutrients.at("fiber");
    if (fiber > 0.0) {
        d.sf_ratio = sugars / fiber;
    } else {
        d.sf_ratio = sugars > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return d;
}

SfPartition partition_by_sf(double sf_ratio) {
    if (sf_ratio < kSfCutoffLow) return SfPartition::Low;
    if (sf_ratio < kSfCutoffHigh) return SfPartition::Mid;
    return SfPartition::High;
}

SfPartition partition_by_sf(const DerivedNutrition& d) {
    return partition_by_sf(d.sf_ratio);
}

std::vector<std::string> select_annotation_candidates(
    const std::vector<Recipe>& recipes,
    const std::vector<DerivedNutrition>& derived,
    const std::map<std::string, double>& probs_a,
    const std::map<std::string, double>& probs_b,
    size_t n_total) {
    const size_t n = recipes.size();
    if (derived.size() != n) throw Error("derived nutrition size mismatch");
    if (n_total > n) throw Error("n_total exceeds corpus size");
    for (const auto& r : recipes) {
        if (!probs_a.count(r.id)) throw Error("missing probability (source a): " + r.id);
        if (!probs_b.count(r.id)) throw Error("missing probability (source b): " + r.id);
    }

    // Sort a copy of indices by id so the result is independent of input order.
    std::vector<size_t> by_id(n);
    for (size_t i = 0; i < n; ++i) by_id[i] = i;
    std::sort(by_id.begin(), by_id.end(),
              [&](size_t a, size_t b) { return recipes[a].id < recipes[b].id; });

    // Ordinal ranks 1..n per source, ascending probability, id breaks ties.
    std::vector<double> rank_sum(n, 0.0);
    for (const auto* probs : {&probs_a, &probs_b}) {
        std::vector<size_t> order = by_id;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return probs->at(recipes[a].id) < probs->at(recipes[b].id);
        });
        for (size_t pos = 0; pos < order.size(); ++pos) {
            rank_sum[order[pos]] += static_cast<double>(pos + 1);
        }
    }

    // Members per partition, ordered by (rank-sum, id).
    std::vector<std::vector<size_t>> members(3);
    for (size_t i : by_id) {
        members[static_cast<size_t>(partition_by_sf(derived[i]))].push_back(i);
    }
    for (auto& m : members) {
        std::stable_sort(m.begin(), m.end(),
                         [&](size_t a, size_t b) { return rank_sum[a] < rank_sum[b]; });
    }

    const size_t third = (n_total + 2) / 3;
    std::vector<size_t> quota(3);
    quota[0] = std::min(third, n_total);
    quota[1] = std::min(third, n_total - quota[0]);
    quota[2] = n_total - quota[0] - quota[1];

    std::vector<size_t> taken(3);
    size_t selected = 0;
    for (size_t p = 0; p < 3; ++p) {
        taken[p] = std::min(quota[p], members[p].size());
        if (taken[p] < quota[p]) {
            log::warn("S/F partition " + std::string(to_string(static_cast<SfPartition>(p))) +
                      " has only " + std::to_string(members[p].size()) +
                      " recipes for a quota of " + std::to_string(quota[p]) +
                      "; redistributing the remainder");
        }
        selected += taken[p];
    }
    // Redistribute any shortfall to partitions that still have members.
    while (selected < n_total) {
        bool progressed = false;
        for (size_t p = 0; p < 3 && selected < n_total; ++p) {
            if (taken[p] < members[p].size()) {
                ++taken[p];
                ++selected;
                progressed = true;
            }
        }
        if (!progressed) break;
    }

    std::vector<std::string> ids;
    ids.reserve(n_total);
    for (size_t p = 0; p < 3; ++p) {
        for (size_t k = 0; k < taken[p]; ++k) ids.push_back(recipes[members[p][k]].id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace glyset::corpus
