#include "doctest.h"

#include "fuzz.hpp"
#include "oracles.hpp"

#include "mgt/textseg.hpp"

using namespace mgt;

TEST_CASE("tokenize_words examples") {
    const auto t = tokenize_words("The cat sat on the mat.");
    CHECK(t.tokens == std::vector<std::string>{"the", "cat", "sat", "on", "the", "mat"});
    CHECK(t.size() == 6);
    CHECK(tokenize_words("").empty());
    CHECK(tokenize_words("   ").empty());
    CHECK(tokenize_words("Don't stop!").tokens == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize_words("\"Quoted,\" she said.").tokens ==
          std::vector<std::string>{"quoted", "she", "said"});
    CHECK(tokenize_words("ÉL ÑANDÚ").tokens == std::vector<std::string>{"él", "ñandú"});
    CHECK(tokenize_words(". , !").empty());
}

TEST_CASE("tokenize_words matches the character-scan oracle on fuzzed strings") {
    std::mt19937 gen(1234);
    for (int i = 0; i < 1000; ++i) {
        const auto s = fuzz::text(gen);
        CHECK(tokenize_words(s).tokens == oracle::tokenize(s));
    }
}

TEST_CASE("split_sentences examples") {
    CHECK(split_sentences("Hi. Go now!").sentences == std::vector<std::string>{"Hi.", "Go now!"});
    CHECK(split_sentences("no terminator").sentences == std::vector<std::string>{"no terminator"});
    CHECK(split_sentences("A.. B?!").sentences == std::vector<std::string>{"A..", "B?!"});
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("   ").empty());
    CHECK(split_sentences("One. Two").size() == 2);
}

TEST_CASE("split_sentences matches the oracle on fuzzed strings") {
    std::mt19937 gen(99);
    for (int i = 0; i < 1000; ++i) {
        const auto s = fuzz::text(gen);
        CHECK(split_sentences(s).sentences == oracle::sentences(s));
    }
}

TEST_CASE("segmentation properties") {
    std::mt19937 gen(5);
    for (int i = 0; i < 300; ++i) {
        const auto a = fuzz::document(gen);
        const auto b = fuzz::document(gen);

        // surrounding whitespace does not change the tokens
        CHECK(tokenize_words("  \t" + a + " \n ").tokens == tokenize_words(a).tokens);

        // every sentence is a substring of the input
        for (const auto& s : split_sentences(a).sentences) {
            CHECK(a.find(s) != std::string::npos);
        }

        // counts are monotone under concatenation with a terminator between parts
        const auto joined = a + ". " + b;
        CHECK(tokenize_words(joined).size() >= tokenize_words(a).size());
        CHECK(tokenize_words(joined).size() >= tokenize_words(b).size());
        CHECK(split_sentences(joined).size() >= split_sentences(a).size());
        CHECK(split_sentences(joined).size() >= split_sentences(b).size());

        for (const auto& tok : tokenize_words(a).tokens) {
            CHECK(!tok.empty());
            CHECK(tok.find(' ') == std::string::npos);
            CHECK(!is_token_punctuation(static_cast<unsigned char>(tok.front())));
            CHECK(!is_token_punctuation(static_cast<unsigned char>(tok.back())));
        }
    }
}
