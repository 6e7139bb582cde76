#include "glyset/features.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"
#include "glyset/log.hpp"
#include "glyset/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace glyset::features {

const char* to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::Count: return "count";
        case ColumnKind::NbWeighted: return "nb_weighted";
        case ColumnKind::Embedding: return "embedding";
        case ColumnKind::Nutritional: return "nutritional";
    }
    return "?";
}

void FeatureMatrix::check_finite() const {
    for (size_t r = 0; r < rows(); ++r) {
        for (size_t c = 0; c < cols(); ++c) {
            if (!std::isfinite(at(r, c))) {
                throw Error("non-finite feature value at row " + row_ids[r] +
                            ", column " + column_names[c]);
            }
        }
    }
}

std::vector<double> bow_counts(const textprep::TokenizedRecipe& tr,
                               const textprep::Vocabulary& v, bool parsed) {
    std::vector<double> counts(v.size(), 0.0);
    for (const auto& tok : tr.all_tokens(parsed)) {
        if (auto idx = v.lookup(tok)) counts[static_cast<size_t>(*idx)] += 1.0;
    }
    return counts;
}

FeatureMatrix bow_matrix(const std::vector<textprep::TokenizedRecipe>& recipes,
                         const textprep::Vocabulary& v, bool parsed, int jobs) {
    FeatureMatrix x;
    x.column_names.reserve(v.size());
    for (const auto& tok : v.tokens) x.column_names.push_back("bow:" + tok);
    x.column_kinds.assign(v.size(), ColumnKind::Count);
    x.standardizable.assign(v.size(), true);
    x.row_ids.reserve(recipes.size());
    for (const auto& tr : recipes) x.row_ids.push_back(tr.id);
    x.data.assign(recipes.size() * v.size(), 0.0);
    parallel_for(recipes.size(), jobs, [&](size_t i) {
        auto row = bow_counts(recipes[i], v, parsed);
        std::copy(row.begin(), row.end(), x.data.begin() + i * v.size());
    });
    return x;
}

NbWeights fit_nb_weights(const FeatureMatrix& counts,
                         const std::vector<size_t>& train_rows,
                         const std::vector<BinaryClass>& y) {
    if (y.size() != counts.rows()) throw Error("fit_nb_weights: label count mismatch");
    const size_t d = counts.cols();
    const double alpha = 1.0;
    std::vector<double> p(d, alpha), q(d, alpha);
    bool saw_ud = false, saw_hd = false;
    for (size_t row : train_rows) {
        if (row >= counts.rows()) throw Error("fit_nb_weights: train row out of range");
        auto& acc = (y[row] == BinaryClass::UD) ? p : q;
        (y[row] == BinaryClass::UD ? saw_ud : saw_hd) = true;
        for (size_t c = 0; c < d; ++c) acc[c] += counts.at(row, c);
    }
    if (!saw_ud || !saw_hd) throw Error("fit_nb_weights: training rows cover a single class");

    double p_norm = std::accumulate(p.begin(), p.end(), 0.0);
    double q_norm = std::accumulate(q.begin(), q.end(), 0.0);
    NbWeights w;
    w.r.resize(d);
    for (size_t c = 0; c < d; ++c) w.r[c] = std::log((p[c] / p_norm) / (q[c] / q_norm));
    return w;
}

std::vector<double> apply_nb_weights(const std::vector<double>& counts, const NbWeights& w) {
    if (counts.size() != w.r.size()) throw Error("apply_nb_weights: dimension mismatch");
    std::vector<double> out(counts.size());
    for (size_t c = 0; c < counts.size(); ++c) out[c] = counts[c] * w.r[c];
    return out;
}

FeatureMatrix apply_nb_weights(const FeatureMatrix& counts, const NbWeights& w) {
    if (counts.cols() != w.r.size()) throw Error("apply_nb_weights: dimension mismatch");
    FeatureMatrix x;
    x.row_ids = counts.row_ids;
    x.column_names.reserve(counts.cols());
    for (const auto& name : counts.column_names) {
        if (name.rfind("bow:", 0) == 0) {
            x.column_names.push_back("nbbow:" + name.substr(4));
        } else {
            x.column_names.push_back("nbbow:" + name);
        }
    }
    x.column_kinds.assign(counts.cols(), ColumnKind::NbWeighted);
    x.standardizable.assign(counts.cols(), false);
    x.data.resize(counts.data.size());
    for (size_t r = 0; r < counts.rows(); ++r) {
        for (size_t c = 0; c < counts.cols(); ++c) {
            x.at(r, c) = counts.at(r, c) * w.r[c];
        }
    }
    return x;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embedding file: " + path.string());

    EmbeddingTable table;
    std::string line;
    size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream ss(line);
        std::string token;
        ss >> token;
        std::vector<double> vec;
        double v;
        while (ss >> v) vec.push_back(v);
        if (!ss.eof()) {
            ss.clear();
            std::string junk;
            if (ss >> junk) {
                throw Error("embedding line " + std::to_string(line_no) +
                            " has a non-numeric value: " + junk);
            }
        }

        if (first) {
            first = false;
            // word2vec-style "<count> <dim>" header: two bare integers.
            if (vec.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos &&
                vec[0] == std::floor(vec[0]) && line.find('.') == std::string::npos) {
                continue;
            }
        }
        if (vec.empty()) throw Error("embedding line " + std::to_string(line_no) + " has no values");
        if (table.dimension == 0) {
            table.dimension = vec.size();
        } else if (vec.size() != table.dimension) {
            throw Error("embedding line " + std::to_string(line_no) + " has " +
                        std::to_string(vec.size()) + " values, expected " +
                        std::to_string(table.dimension));
        }
        if (table.vectors.count(token)) {
            log::warn("duplicate embedding token '" + token + "' at line " +
                      std::to_string(line_no) + "; keeping the last");
        }
        table.vectors[token] = std::move(vec);
    }
    if (table.vectors.empty()) throw Error("embedding file has no vectors: " + path.string());
    return table;
}

std::vector<double> embed_recipe(const textprep::TokenizedRecipe& tr,
                                 const EmbeddingTable& table) {
    std::vector<double> sum(table.dimension, 0.0);
    size_t matched = 0;
    for (const auto& tok : tr.all_tokens(false)) {
        if (const auto* vec = table.lookup(tok)) {
            for (size_t i = 0; i < table.dimension; ++i) sum[i] += (*vec)[i];
            ++matched;
        }
    }
    if (matched == 0) {
        log::warn("recipe " + tr.id + " has no tokens in the embedding table; using zero vector");
        return sum;
    }
    for (double& v : sum) v /= static_cast<double>(matched);
    return sum;
}

FeatureMatrix embedding_matrix(const std::vector<textprep::TokenizedRecipe>& recipes,
                               const EmbeddingTable& table, int jobs) {
    FeatureMatrix x;
    x.column_names.reserve(table.dimension);
    for (size_t i = 0; i < table.dimension; ++i) {
        x.column_names.push_back("emb:" + std::to_string(i));
    }
    x.column_kinds.assign(table.dimension, ColumnKind::Embedding);
    x.standardizable.assign(table.dimension, true);
    x.row_ids.reserve(recipes.size());
    for (const auto& tr : recipes) x.row_ids.push_back(tr.id);
    x.data.assign(recipes.size() * table.dimension, 0.0);
    parallel_for(recipes.size(), jobs, [&](size_t i) {
        auto row = embed_recipe(recipes[i], table);
        std::copy(row.begin(), row.end(), x.data.begin() + i * table.dimension);
    });
    x.check_finite();
    return x;
}

std::vector<std::string> common_nutrient_names(const std::vector<corpus::Recipe>& recipes) {
    if (recipes.empty()) return {};
    std::vector<std::string> names;
    for (const auto& [name, _] : recipes[0].nutrients) {
        if (!corpus::is_energy_key(name)) names.push_back(name);
    }
    for (const auto& r : recipes) {
        std::erase_if(names, [&](const std::string& n) { return !r.nutrients.count(n); });
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<double> nutritional_vector(const corpus::Recipe& r,
                                       const corpus::DerivedNutrition& d,
                                       const std::vector<std::string>& nutrient_names) {
    std::vector<double> out;
    out.reserve(nutrient_names.size() + 1);
    for (const auto& name : nutrient_names) {
        auto it = d.normalized.find(name);
        if (it == d.normalized.end()) {
            throw Error("recipe " + r.id + " missing configured nutrient: " + name);
        }
        out.push_back(it->second);
    }
    out.push_back(d.dry_weight);
    return out;
}

FeatureMatrix nutritional_matrix(const std::vector<corpus::Recipe>& recipes,
                                 const std::vector<corpus::DerivedNutrition>& derived,
                                 const std::vector<std::string>& nutrient_names) {
    if (recipes.size() != derived.size()) throw Error("nutritional_matrix: size mismatch");
    const size_t d = nutrient_names.size() + 1;
    FeatureMatrix x;
    for (const auto& name : nutrient_names) x.column_names.push_back("nu:" + name);
    x.column_names.push_back("nu:dry_weight");
    x.column_kinds.assign(d, ColumnKind::Nutritional);
    x.standardizable.assign(d, true);
    x.row_ids.reserve(recipes.size());
    for (const auto& r : recipes) x.row_ids.push_back(r.id);
    x.data.resize(recipes.size() * d);
    for (size_t i = 0; i < recipes.size(); ++i) {
        auto row = nutritional_vector(recipes[i], derived[i], nutrient_names);
        std::copy(row.begin(), row.end(), x.data.begin() + i * d);
    }
    x.check_finite();
    return x;
}

Standardizer fit_standardizer(const FeatureMatrix& x, const std::vector<size_t>& train_rows) {
    if (train_rows.empty()) throw Error("fit_standardizer: no training rows");
    Standardizer s;
    s.mean.assign(x.cols(), 0.0);
    s.stdev.assign(x.cols(), 1.0);
    s.active.assign(x.cols(), false);
    const double n = static_cast<double>(train_rows.size());
    for (size_t c = 0; c < x.cols(); ++c) {
        if (!x.standardizable[c]) continue;
        double mean = 0.0;
        for (size_t r : train_rows) {
            if (r >= x.rows()) throw Error("fit_standardizer: train row out of range");
            mean += x.at(r, c);
        }
        mean /= n;
        double var = 0.0;
        for (size_t r : train_rows) {
            double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= n;
        double sd = std::sqrt(var);
        if (sd == 0.0) {
            log::warn("constant feature column left unscaled: " + x.column_names[c]);
            continue;
        }
        s.mean[c] = mean;
        s.stdev[c] = sd;
        s.active[c] = true;
    }
    return s;
}

FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x) {
    if (s.mean.size() != x.cols()) throw Error("apply_standardizer: column count mismatch");
    FeatureMatrix out = x;
    for (size_t c = 0; c < x.cols(); ++c) {
        if (!s.active[c]) continue;
        for (size_t r = 0; r < x.rows(); ++r) {
            out.at(r, c) = (x.at(r, c) - s.mean[c]) / s.stdev[c];
        }
    }
    return out;
}

FeatureMatrix concat(const std::vector<FeatureMatrix>& parts) {
    if (parts.empty()) throw Error("concat: no matrices");
    FeatureMatrix out;
    out.row_ids = parts[0].row_ids;
    size_t total_cols = 0;
    for (const auto& p : parts) {
        if (p.row_ids != out.row_ids) throw Error("concat: row ids differ between matrices");
        total_cols += p.cols();
        out.column_names.insert(out.column_names.end(), p.column_names.begin(),
                                p.column_names.end());
        out.column_kinds.insert(out.column_kinds.end(), p.column_kinds.begin(),
                                p.column_kinds.end());
        out.standardizable.insert(out.standardizable.end(), p.standardizable.begin(),
                                  p.standardizable.end());
    }
    out.data.resize(out.rows() * total_cols);
    for (size_t r = 0; r < out.rows(); ++r) {
        size_t offset = 0;
        for (const auto& p : parts) {
            for (size_t c = 0; c < p.cols(); ++c) out.at(r, offset + c) = p.at(r, c);
            offset += p.cols();
        }
    }
    return out;
}

void write_matrix_csv(const FeatureMatrix& x, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    std::vector<std::string> header{"recipe_id"};
    header.insert(header.end(), x.column_names.begin(), x.column_names.end());
    csv::write_row(out, header);
    for (size_t r = 0; r < x.rows(); ++r) {
        std::vector<std::string> row{x.row_ids[r]};
        for (size_t c = 0; c < x.cols(); ++c) row.push_back(csv::format_double(x.at(r, c)));
        csv::write_row(out, row);
    }
}

} // namespace glyset::features
