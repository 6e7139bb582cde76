#include "glyset/errors.hpp"
#include "glyset/textprep.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace glyset;
using testsup::TempDir;

TEST_CASE("tokenizer lowercases, strips punctuation, keeps numerals") {
    auto toks = textprep::tokenize_text("Mix the BUTTER, 1/2 cup sugar!");
    CHECK(toks == std::vector<std::string>{"mix", "the", "butter", "1", "2", "cup", "sugar"});

    CHECK(textprep::tokenize_text("").empty());
    CHECK(textprep::tokenize_text("   \t  ").empty());
    CHECK(textprep::tokenize_text("semi-sweet") == std::vector<std::string>{"semi", "sweet"});
}

TEST_CASE("ingredient parsing strips amounts, units, and parentheticals") {
    std::vector<std::string> lines = {
        "2 1/2 cups all-purpose flour (sifted)",
        "1 tsp vanilla extract",
        "3 large eggs",
        "½ cup butter",
    };
    auto parsed = textprep::parse_ingredients(lines, textprep::default_quantity_stoplist());
    REQUIRE(parsed.size() == lines.size());
    CHECK(parsed[0] == "all-purpose flour");
    CHECK(parsed[1] == "vanilla extract");
    CHECK(parsed[2] == "large eggs");
    CHECK(parsed[3] == "butter");
}

TEST_CASE("ingredient parsing keeps original casing and order") {
    auto parsed = textprep::parse_ingredients({"4 oz Cheddar Cheese, shredded"},
                                              textprep::default_quantity_stoplist());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == "Cheddar Cheese, shredded");
}

TEST_CASE("custom stop-list loads from file") {
    TempDir dir;
    auto path = dir / "stop.txt";
    testsup::write_file(path, "handful\nsmidgen\n\n");
    auto stop = textprep::load_stoplist(path);
    CHECK(stop == std::vector<std::string>{"handful", "smidgen"});

    auto parsed = textprep::parse_ingredients({"1 handful raisins"}, stop);
    CHECK(parsed[0] == "raisins");

    CHECK_THROWS_AS(textprep::load_stoplist(dir / "missing.txt"), Error);
}

TEST_CASE("tokenized recipe concatenates title, ingredients, directions") {
    corpus::Recipe r = testsup::make_recipe("t1");
    r.title = "Quick Bread";
    r.ingredients = {"2 cups flour", "1 pinch salt"};
    r.directions = {"Mix well.", "Bake at 350."};
    auto tr = textprep::tokenize(r);

    CHECK(tr.tokens_title == std::vector<std::string>{"quick", "bread"});
    CHECK(tr.tokens_ingredients ==
          std::vector<std::string>{"2", "cups", "flour", "1", "pinch", "salt"});
    CHECK(tr.tokens_ingredients_parsed == std::vector<std::string>{"flour", "salt"});
    CHECK(tr.tokens_directions == std::vector<std::string>{"mix", "well", "bake", "at", "350"});

    auto raw = tr.all_tokens(false);
    CHECK(raw == std::vector<std::string>{"quick", "bread", "2", "cups", "flour", "1", "pinch",
                                          "salt", "mix", "well", "bake", "at", "350"});
    auto parsed = tr.all_tokens(true);
    CHECK(parsed == std::vector<std::string>{"quick", "bread", "flour", "salt", "mix", "well",
                                             "bake", "at", "350"});
}

TEST_CASE("vocabulary keeps frequent tokens in count-then-token order") {
    std::vector<textprep::TokenizedRecipe> corpus(3);
    corpus[0].tokens_title = {"flour", "sugar", "flour"};
    corpus[1].tokens_title = {"sugar", "flour", "salt"};
    corpus[2].tokens_title = {"flour", "sugar", "rare"};

    auto v = textprep::build_vocabulary(corpus, 2);
    REQUIRE(v.size() == 2);
    // flour appears 4 times, sugar 3; salt and rare fall under min_count.
    CHECK(v.tokens == std::vector<std::string>{"flour", "sugar"});
    CHECK(v.counts == std::vector<int64_t>{4, 3});
    CHECK(v.lookup("flour") == 0);
    CHECK(v.lookup("sugar") == 1);
    CHECK_FALSE(v.lookup("salt").has_value());
    CHECK_FALSE(v.lookup("never-seen").has_value());
}

TEST_CASE("vocabulary breaks count ties by token") {
    std::vector<textprep::TokenizedRecipe> corpus(1);
    corpus[0].tokens_title = {"pear", "apple", "pear", "apple"};
    auto v = textprep::build_vocabulary(corpus, 1);
    CHECK(v.tokens == std::vector<std::string>{"apple", "pear"});
}

TEST_CASE("parsed vocabulary uses the parsed ingredient stream") {
    std::vector<textprep::TokenizedRecipe> corpus(1);
    corpus[0].tokens_ingredients = {"2", "cups", "flour"};
    corpus[0].tokens_ingredients_parsed = {"flour"};
    auto raw = textprep::build_vocabulary(corpus, 1, false);
    auto parsed = textprep::build_vocabulary(corpus, 1, true);
    CHECK(raw.lookup("cups").has_value());
    CHECK_FALSE(parsed.lookup("cups").has_value());
    CHECK(parsed.lookup("flour").has_value());

    CHECK_THROWS_WITH_AS(textprep::build_vocabulary({}, 1),
                         "cannot build vocabulary from an empty corpus", Error);
}

TEST_CASE("vocabulary csv lists token, index, count") {
    TempDir dir;
    std::vector<textprep::TokenizedRecipe> corpus(1);
    corpus[0].tokens_title = {"b", "b", "a"};
    auto v = textprep::build_vocabulary(corpus, 1);
    auto path = dir / "vocab.csv";
    textprep::write_vocabulary_csv(v, path);
    CHECK(testsup::read_file(path) == "token,index,count\nb,0,2\na,1,1\n");
}
