#include "mgt/textseg.hpp"

#include "mgt/corpus.hpp"
#include "mgt/utf8.hpp"

#include <algorithm>

namespace mgt {
namespace {

bool is_terminator(char32_t cp) noexcept { return cp == U'.' || cp == U'!' || cp == U'?'; }

std::string_view trim(std::string_view text) {
    std::size_t begin = text.size();
    std::size_t end = 0;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t at = pos;
        if (!utf8::is_space(utf8::decode(text, pos))) {
            begin = std::min(begin, at);
            end = pos;
        }
    }
    return begin < end ? text.substr(begin, end - begin) : std::string_view{};
}

std::string strip_and_lower(std::string_view piece) {
    std::vector<char32_t> cps;
    for (std::size_t pos = 0; pos < piece.size();) {
        cps.push_back(utf8::decode(piece, pos));
    }
    std::size_t lo = 0;
    std::size_t hi = cps.size();
    while (lo < hi && is_token_punctuation(cps[lo])) {
        ++lo;
    }
    while (hi > lo && is_token_punctuation(cps[hi - 1])) {
        --hi;
    }
    std::string out;
    for (std::size_t i = lo; i < hi; ++i) {
        utf8::append(out, utf8::to_lower(cps[i]));
    }
    return out;
}

} // namespace

bool is_token_punctuation(char32_t cp) noexcept {
    if (is_sentence_punctuation(cp)) {
        return true;
    }
    return cp < 0x80 && cp > 0x20 && cp != 0x7F && !utf8::is_letter(cp) && !utf8::is_digit(cp);
}

TokenSequence tokenize_words(std::string_view clean_text) {
    TokenSequence out;
    std::size_t start = 0;
    std::size_t pos = 0;
    auto flush = [&](std::size_t end) {
        if (end > start) {
            auto token = strip_and_lower(clean_text.substr(start, end - start));
            if (!token.empty()) {
                out.tokens.push_back(std::move(token));
            }
        }
    };
    while (pos < clean_text.size()) {
        const std::size_t at = pos;
        if (utf8::is_space(utf8::decode(clean_text, pos))) {
            flush(at);
            start = pos;
        }
    }
    flush(clean_text.size());
    return out;
}

SentenceSegmentation split_sentences(std::string_view clean_text) {
    SentenceSegmentation out;
    std::size_t start = 0;
    std::size_t pos = 0;
    auto emit = [&](std::size_t end) {
        const auto piece = trim(clean_text.substr(start, end - start));
        if (!piece.empty()) {
            out.sentences.emplace_back(piece);
        }
        start = end;
    };
    while (pos < clean_text.size()) {
        if (!is_terminator(utf8::decode(clean_text, pos))) {
            continue;
        }
        std::size_t run_end = pos;
        while (run_end < clean_text.size()) {
            std::size_t next = run_end;
            if (!is_terminator(utf8::decode(clean_text, next))) {
                break;
            }
            run_end = next;
        }
        pos = run_end;
        emit(run_end);
    }
    emit(clean_text.size());
    return out;
}

} // namespace mgt
