#pragma once

#include <random>
#include <string>
#include <vector>

namespace fuzz {

/// Random text over letters (ASCII and Latin-1), digits, ASCII punctuation and the
/// whitespace characters the oracles understand.
inline std::string text(std::mt19937& gen, std::size_t max_len = 60) {
    static const std::vector<std::string> alphabet{
        "a", "b", "c", "e", "x", "A", "B", "Q", "é", "É", "ñ", "Ñ", "ü", "À", "ß", "1", "7",
        " ", " ", " ", "  ", "\t", "\n", "\xC2\xA0",
        ".", ".", "!", "?", ",", ";", ":", "'", "\"", "-", "(", ")", "..."};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s;
    for (std::size_t i = len(gen); i > 0; --i) {
        s += alphabet[pick(gen)];
    }
    return s;
}

/// Random prose-like document: words from a small pool, sentences ended by . ! or ?.
inline std::string document(std::mt19937& gen) {
    static const std::vector<std::string> words{"the", "cat", "sat", "on", "mat", "a", "dog", "ran",
                                                "más", "niño", "über", "zz", "don't", "x", "longerword"};
    std::uniform_int_distribution<std::size_t> sentences(1, 6);
    std::uniform_int_distribution<std::size_t> length(1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> coin(0, 9);
    std::string s;
    for (std::size_t k = sentences(gen); k > 0; --k) {
        const auto n = length(gen);
        for (std::size_t i = 0; i < n; ++i) {
            if (!s.empty()) {
                s += ' ';
            }
            auto w = words[pick(gen)];
            if (i == 0 && coin(gen) < 5 && w[0] >= 'a' && w[0] <= 'z') {
                w[0] = static_cast<char>(w[0] - 32);
            }
            s += w;
            if (coin(gen) == 0) {
                s += ',';
            }
        }
        const int t = coin(gen);
        s += t < 7 ? "." : (t < 8 ? "!" : (t < 9 ? "?" : "?!"));
    }
    return s;
}

} // namespace fuzz
