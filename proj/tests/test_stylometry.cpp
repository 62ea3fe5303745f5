#include "doctest.h"

#include "fuzz.hpp"
#include "oracles.hpp"

#include "mgt/errors.hpp"
#include "mgt/stylometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

using namespace mgt;

namespace {

TokenSequence tokens(std::vector<std::string> t) { return TokenSequence{std::move(t)}; }

Document doc(std::string text, std::string id = "d") {
    return Document{std::move(id), Language::en, TaskLabel{}, std::move(text), ""};
}

} // namespace

TEST_CASE("the four measures on the worked sentence") {
    const auto t = tokens({"the", "cat", "sat", "on", "the", "mat"});
    // 3+3+3+2+3+3 = 17 characters over 6 words
    CHECK(awl(t) == doctest::Approx(17.0 / 6.0).epsilon(1e-15));
    CHECK(vr(t) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(rr(t) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(asl(SentenceSegmentation{{"The cat sat on the mat."}}) == 23.0);
}

TEST_CASE("measure edge cases") {
    CHECK(awl(tokens({"a"})) == 1.0);
    CHECK(asl(SentenceSegmentation{{"ab", "cd"}}) == 2.0);
    CHECK(vr(tokens({"a", "b", "c"})) == 1.0);
    CHECK(vr(tokens({"x", "x", "x", "x"})) == 0.25);
    CHECK(rr(tokens({"a", "b", "c"})) == 0.0);
    CHECK(rr(tokens({"x", "x", "y", "y"})) == 0.5);
    CHECK(awl(tokens({"más"})) == 3.0);  // code points, not bytes

    CHECK_THROWS_AS(awl(TokenSequence{}), UndefinedFeatureError);
    CHECK_THROWS_AS(vr(TokenSequence{}), UndefinedFeatureError);
    CHECK_THROWS_AS(rr(TokenSequence{}), UndefinedFeatureError);
    CHECK_THROWS_AS(asl(SentenceSegmentation{}), UndefinedFeatureError);
}

TEST_CASE("feature_row composes segmentation and measures") {
    const auto f = feature_row(doc("The cat sat on the mat."), PreprocessMode::unicode_letters);
    CHECK(f.awl == doctest::Approx(17.0 / 6.0));
    CHECK(f.asl == 23.0);
    CHECK(f.vr == doctest::Approx(5.0 / 6.0));
    CHECK(f.rr == doctest::Approx(1.0 / 6.0));
    CHECK(f.n == 6);
    CHECK(f.m == 1);
    CHECK(f.unique_types == 5);
    CHECK(f.repeated_types == 1);

    const auto tiny = feature_row(doc("a."), PreprocessMode::strict_ascii);
    CHECK(tiny.awl == 1.0);
    CHECK(tiny.asl == 2.0);
    CHECK(tiny.vr == 1.0);
    CHECK(tiny.rr == 0.0);
}

TEST_CASE("feature_row names the offending document") {
    try {
        feature_row(doc("™ ™ —", "doc-42"), PreprocessMode::unicode_letters);
        FAIL("expected an undefined-feature error");
    } catch (const UndefinedFeatureError& e) {
        CHECK(std::string(e.what()).find("doc-42") != std::string::npos);
    }
    CHECK_THROWS_AS(feature_row(doc("..."), PreprocessMode::unicode_letters), UndefinedFeatureError);
}

TEST_CASE("measure invariants hold on fuzzed documents") {
    std::mt19937 gen(17);
    for (int i = 0; i < 500; ++i) {
        const auto text = fuzz::document(gen);
        const auto f = feature_row(doc(text), PreprocessMode::unicode_letters);
        CHECK(f.awl >= 1.0);
        CHECK(f.vr > 0.0);
        CHECK(f.vr <= 1.0);
        CHECK(f.rr >= 0.0);
        CHECK(f.rr <= 0.5);
        CHECK(f.vr + f.rr <= 1.0 + 1e-15);
        CHECK(f.vr == static_cast<double>(f.unique_types) / static_cast<double>(f.n));
        CHECK(f.rr == static_cast<double>(f.repeated_types) / static_cast<double>(f.n));

        // permutation invariance and duplication behaviour
        auto t = tokenize_words(preprocess(text, PreprocessMode::unicode_letters));
        auto shuffled = t;
        std::shuffle(shuffled.tokens.begin(), shuffled.tokens.end(), gen);
        CHECK(awl(shuffled) == doctest::Approx(awl(t)).epsilon(1e-14));
        CHECK(vr(shuffled) == vr(t));
        CHECK(rr(shuffled) == rr(t));
        auto doubled = t;
        doubled.tokens.insert(doubled.tokens.end(), t.tokens.begin(), t.tokens.end());
        // doubling makes every type repeated: vr halves and rr becomes vr / 2
        CHECK(vr(doubled) == doctest::Approx(vr(t) / 2.0).epsilon(1e-14));
        CHECK(rr(doubled) == doctest::Approx(vr(t) / 2.0).epsilon(1e-14));

        // equality case of vr + rr <= 1
        std::map<std::string, int> counts;
        for (const auto& w : t.tokens) {
            ++counts[w];
        }
        const bool all_twice = std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second <= 2; });
        if (all_twice) {
            CHECK(vr(t) + rr(t) == doctest::Approx(1.0));
        } else {
            CHECK(vr(t) + rr(t) < 1.0);
        }
    }
}

TEST_CASE("measures match the brute-force oracle on random token lists") {
    std::mt19937 gen(4242);
    const std::vector<std::string> pool{"a", "bb", "ccc", "dddd", "é", "ñu", "x", "yy", "zzz", "más"};
    std::uniform_int_distribution<std::size_t> len(1, 40);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 1000; ++i) {
        TokenSequence t;
        for (std::size_t k = len(gen); k > 0; --k) {
            t.tokens.push_back(pool[pick(gen)]);
        }
        const auto expected = oracle::stylo(t.tokens, {"x"});
        CHECK(std::abs(awl(t) - expected.awl) <= 1e-12);
        CHECK(std::abs(vr(t) - expected.vr) <= 1e-12);
        CHECK(std::abs(rr(t) - expected.rr) <= 1e-12);
    }
}

TEST_CASE("sentence order does not change asl") {
    SentenceSegmentation s{{"One two.", "Three!", "Four five six?"}};
    SentenceSegmentation r{{"Four five six?", "One two.", "Three!"}};
    CHECK(asl(s) == asl(r));
}

TEST_CASE("parallel feature kernel matches the serial reference") {
    std::mt19937 gen(8);
    std::vector<Document> docs;
    for (int i = 0; i < 400; ++i) {
        docs.push_back(doc(fuzz::document(gen), "d" + std::to_string(i)));
    }
    const auto serial = feature_rows_serial(docs, PreprocessMode::unicode_letters);
    const auto parallel = feature_rows(docs, PreprocessMode::unicode_letters, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].values() == parallel[i].values());
    }

    docs[123].raw_text = "™";
    docs[321].raw_text = "—";
    try {
        feature_rows(docs, PreprocessMode::unicode_letters, 4);
        FAIL("expected an error");
    } catch (const UndefinedFeatureError& e) {
        CHECK(std::string(e.what()).find("d123") != std::string::npos);
    }
}

TEST_CASE("features tsv uses six decimals") {
    std::vector<Document> docs{doc("The cat sat on the mat.", "x1")};
    docs[0].language = Language::es;
    docs[0].label = TaskLabel{Task::detection, 1};
    const auto rows = feature_rows_serial(docs, PreprocessMode::unicode_letters);
    std::ostringstream out;
    write_features_tsv(out, docs, rows);
    CHECK(out.str() == "id\tlanguage\tlabel\tawl\tasl\tvr\trr\nx1\tes\thuman\t2.833333\t23.000000\t0.833333\t0.166667\n");
}
