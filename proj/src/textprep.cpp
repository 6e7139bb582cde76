#include "glyset/textprep.hpp"

#include "glyset/csvio.hpp"
#include "glyset/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <unordered_set>

namespace glyset::textprep {

namespace {

bool is_ascii_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

// UTF-8 sequences for the vulgar fraction codepoints U+00BC..U+00BE and
// U+2150..U+215E.
bool eat_vulgar_fraction(const std::string& s, size_t& i) {
    if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC2) {
        unsigned char b = static_cast<unsigned char>(s[i + 1]);
        if (b >= 0xBC && b <= 0xBE) {
            i += 2;
            return true;
        }
    }
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x85) {
        unsigned char b = static_cast<unsigned char>(s[i + 2]);
        if (b >= 0x90 && b <= 0x9E) {
            i += 3;
            return true;
        }
    }
    return false;
}

// A numeral is digits possibly broken by . , or / separators ("2", "1.5",
// "1/2", "8,000"), or any digit/fraction mix ("1½", "½").
bool is_numeral(const std::string& token) {
    if (token.empty()) return false;
    bool saw_digit = false;
    bool prev_sep = true; // separator may not lead, trail, or repeat
    for (size_t i = 0; i < token.size();) {
        char c = token[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            saw_digit = true;
            prev_sep = false;
            ++i;
        } else if (c == '.' || c == ',' || c == '/') {
            if (prev_sep) return false;
            prev_sep = true;
            ++i;
        } else if (eat_vulgar_fraction(token, i)) {
            saw_digit = true;
            prev_sep = false;
        } else {
            return false;
        }
    }
    return saw_digit && !prev_sep;
}

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string strip_outer_punct(const std::string& token) {
    size_t b = 0, e = token.size();
    while (b < e && is_ascii_punct(static_cast<unsigned char>(token[b]))) ++b;
    while (e > b && is_ascii_punct(static_cast<unsigned char>(token[e - 1]))) --e;
    return token.substr(b, e - b);
}

std::string remove_parenthesized(const std::string& line) {
    std::string out;
    int depth = 0;
    for (char c : line) {
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (depth > 0) --depth;
        } else if (depth == 0) {
            out += c;
        }
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

} // namespace

const std::vector<std::string>& default_quantity_stoplist() {
    static const std::vector<std::string> list = {
        "cup", "cups", "tablespoon", "tbsp", "teaspoon", "tsp", "ounce", "oz",
        "pound", "lb", "gram", "g", "ml", "liter", "pinch", "dash", "clove",
        "slice", "can", "package", "inch"};
    return list;
}

std::vector<std::string> load_stoplist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read stop-list file: " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.push_back(ascii_lower(line));
    }
    return words;
}

std::vector<std::string> tokenize_text(const std::string& text) {
    std::string buf;
    buf.reserve(text.size());
    for (unsigned char c : text) {
        if (is_ascii_punct(c)) {
            buf += ' ';
        } else if (c < 0x80) {
            buf += static_cast<char>(std::tolower(c));
        } else {
            buf += static_cast<char>(c);
        }
    }
    return split_ws(buf);
}

std::vector<std::string> parse_ingredients(const std::vector<std::string>& lines,
                                           const std::vector<std::string>& stoplist) {
    std::unordered_set<std::string> stop(stoplist.begin(), stoplist.end());
    std::vector<std::string> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        std::string kept;
        for (const auto& token : split_ws(remove_parenthesized(line))) {
            std::string core = strip_outer_punct(token);
            if (core.empty() || is_numeral(core) || stop.count(ascii_lower(core))) continue;
            if (!kept.empty()) kept += ' ';
            kept += token;
        }
        out.push_back(std::move(kept));
    }
    return out;
}

std::vector<std::string> TokenizedRecipe::all_tokens(bool parsed) const {
    std::vector<std::string> out = tokens_title;
    const auto& ing = parsed ? tokens_ingredients_parsed : tokens_ingredients;
    out.insert(out.end(), ing.begin(), ing.end());
    out.insert(out.end(), tokens_directions.begin(), tokens_directions.end());
    return out;
}

TokenizedRecipe tokenize(const corpus::Recipe& r, const std::vector<std::string>& stoplist) {
    TokenizedRecipe t;
    t.id = r.id;
    t.tokens_title = tokenize_text(r.title);
    for (const auto& line : r.ingredients) {
        auto toks = tokenize_text(line);
        t.tokens_ingredients.insert(t.tokens_ingredients.end(), toks.begin(), toks.end());
    }
    for (const auto& line : parse_ingredients(r.ingredients, stoplist)) {
        auto toks = tokenize_text(line);
        t.tokens_ingredients_parsed.insert(t.tokens_ingredients_parsed.end(), toks.begin(),
                                           toks.end());
    }
    for (const auto& line : r.directions) {
        auto toks = tokenize_text(line);
        t.tokens_directions.insert(t.tokens_directions.end(), toks.begin(), toks.end());
    }
    return t;
}

Vocabulary build_vocabulary(const std::vector<TokenizedRecipe>& corpus, int min_count,
                            bool parsed) {
    if (corpus.empty()) throw Error("cannot build vocabulary from an empty corpus");
    std::map<std::string, int64_t> counts;
    for (const auto& tr : corpus) {
        for (const auto& tok : tr.all_tokens(parsed)) ++counts[tok];
    }
    std::vector<std::pair<std::string, int64_t>> kept;
    for (const auto& [tok, c] : counts) {
        if (c >= min_count) kept.emplace_back(tok, c);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count = min_count;
    v.tokens.reserve(kept.size());
    v.counts.reserve(kept.size());
    for (const auto& [tok, c] : kept) {
        v.index.emplace(tok, static_cast<int>(v.tokens.size()));
        v.tokens.push_back(tok);
        v.counts.push_back(c);
    }
    return v;
}

void write_vocabulary_csv(const Vocabulary& v, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write vocabulary file: " + path.string());
    csv::write_row(out, {"token", "index", "count"});
    for (size_t i = 0; i < v.tokens.size(); ++i) {
        csv::write_row(out, {v.tokens[i], std::to_string(i), std::to_string(v.counts[i])});
    }
}

} // namespace glyset::textprep
