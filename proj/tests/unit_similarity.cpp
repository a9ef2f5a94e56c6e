#include "doctest.h"

#include <random>

#include "mmqo/errors.hpp"
#include "mmqo/similarity.hpp"

using namespace mmqo;

TEST_CASE("the motivating pairs classify as expected") {
    SimilarityChecker checker;

    SimilarityReport same = checker.compare("how many persons", "how many people");
    CHECK(same.equivalent);
    CHECK(same.combined >= 0.5);

    SimilarityReport diff = checker.compare("men", "women");
    CHECK(!diff.equivalent);
    CHECK(diff.combined < 0.5);

    SimilarityReport id = checker.compare("are there dogs?", "are there dogs?");
    CHECK(id.lexical_score == doctest::Approx(1.0));
    CHECK(id.semantic_score == doctest::Approx(1.0));
    CHECK(id.combined == doctest::Approx(1.0));
    CHECK(id.equivalent);
}

TEST_CASE("singular, plural and synonyms fold together") {
    SimilarityChecker checker;
    CHECK(checker.equivalent("man", "men"));
    CHECK(checker.equivalent("dog", "dogs"));
    CHECK(checker.equivalent("picture", "image"));
    CHECK(!checker.equivalent("dog", "cat"));
    CHECK(!checker.equivalent("red car", "blue car")); // partial overlap stays below 0.5
}

TEST_CASE("similarity is symmetric with scores in range over random pairs") {
    static const char *pool[] = {
        "man",  "men",   "woman", "women", "dog",   "dogs", "cat",  "tree",
        "car",  "cars",  "bird",  "boat",  "house", "person", "people", "child",
        "how many dogs", "how many people", "are there trees", "red car",
    };
    std::mt19937_64 rng(2024);
    SimilarityChecker checker;
    for (int i = 0; i < 200; ++i) {
        std::string a = pool[rng() % std::size(pool)];
        std::string b = pool[rng() % std::size(pool)];
        SimilarityReport ab = checker.compare(a, b);
        SimilarityReport ba = checker.compare(b, a);
        CHECK(ab.combined == ba.combined);
        CHECK(ab.equivalent == ba.equivalent);
        CHECK(ab.lexical_score >= 0.0);
        CHECK(ab.lexical_score <= 1.0 + 1e-15);
        CHECK(ab.semantic_score >= 0.0);
        CHECK(ab.semantic_score <= 1.0);
        CHECK(ab.combined == doctest::Approx(ab.lexical_score * ab.semantic_score));
        if (a == b) CHECK(ab.combined == doctest::Approx(1.0));
    }
}

namespace {

struct FlakyProvider : EmbeddingProvider {
    SparseVec embed(const std::string &) const override {
        throw BackendUnavailableError("remote model offline");
    }
    std::string name() const override { return "flaky"; }
};

} // namespace

TEST_CASE("backend failure degrades to lexical-only scoring with a warning") {
    SimilarityChecker checker(std::make_shared<FlakyProvider>());
    int warnings = 0;
    checker.set_warning_sink([&](const std::string &) { ++warnings; });

    SimilarityReport r = checker.compare("how many persons", "how many people");
    CHECK(r.degraded);
    CHECK(r.combined == doctest::Approx(r.lexical_score));
    CHECK(r.equivalent); // synonym fold still carries it over the threshold
    CHECK(warnings == 1);
}

TEST_CASE("custom lexicons load from JSON") {
    SynonymLexicon lex = SynonymLexicon::from_json_text(
        R"js([["auto","automobile","vehicle"],["hund","dog"]])js");
    CHECK(lex.canonical("vehicle") == "auto");
    CHECK(lex.canonical("dog") == "hund");
    CHECK(lex.canonical("unrelated") == "unrelated");
    CHECK_THROWS_AS((void)SynonymLexicon::from_json_text("{}"), ConfigError);
}

TEST_CASE("partial token overlap lands strictly between the extremes") {
    SimilarityChecker checker;
    SimilarityReport r = checker.compare("how many dogs", "how many cats");
    CHECK(r.lexical_score > 0.0);
    CHECK(r.lexical_score < 1.0);
}
