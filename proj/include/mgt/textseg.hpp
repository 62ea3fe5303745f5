#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mgt {

/// Lowercased word tokens of one text (the W of the lexical measures; n = size()).
struct TokenSequence {
    std::vector<std::string> tokens;

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

/// Trimmed sentence strings of one text (m = size()).
struct SentenceSegmentation {
    std::vector<std::string> sentences;

    std::size_t size() const noexcept { return sentences.size(); }
    bool empty() const noexcept { return sentences.empty(); }
};

/// Splits on whitespace, strips leading and trailing punctuation from each piece and
/// lowercases it. Pieces left empty are dropped; inner apostrophes survive ("don't").
TokenSequence tokenize_words(std::string_view clean_text);

/// Cuts after every maximal run of . ! ? and trims the pieces. A trailing piece
/// without a terminator is a sentence of its own.
SentenceSegmentation split_sentences(std::string_view clean_text);

bool is_token_punctuation(char32_t cp) noexcept;

} // namespace mgt
