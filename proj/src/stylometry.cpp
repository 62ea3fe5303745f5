#include "mgt/stylometry.hpp"

#include "mgt/errors.hpp"
#include "mgt/parallel.hpp"
#include "mgt/utf8.hpp"

#include <cstdio>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace mgt {
namespace {

struct TypeCounts {
    std::size_t unique{0};
    std::size_t repeated{0};
};

TypeCounts count_types(const TokenSequence& tokens) {
    std::unordered_map<std::string_view, std::size_t> freq;
    freq.reserve(tokens.size());
    for (const auto& t : tokens.tokens) {
        ++freq[t];
    }
    TypeCounts out;
    out.unique = freq.size();
    for (const auto& [word, count] : freq) {
        if (count >= 2) {
            ++out.repeated;
        }
    }
    return out;
}

void require_tokens(const TokenSequence& tokens, const char* measure) {
    if (tokens.empty()) {
        throw UndefinedFeatureError(std::string(measure) + " is undefined for a text without words");
    }
}

} // namespace

double awl(const TokenSequence& tokens) {
    require_tokens(tokens, "awl");
    std::size_t chars = 0;
    for (const auto& t : tokens.tokens) {
        chars += utf8::length(t);
    }
    return static_cast<double>(chars) / static_cast<double>(tokens.size());
}

double asl(const SentenceSegmentation& sentences) {
    if (sentences.empty()) {
        throw UndefinedFeatureError("asl is undefined for a text without sentences");
    }
    std::size_t chars = 0;
    for (const auto& s : sentences.sentences) {
        chars += utf8::length(s);
    }
    return static_cast<double>(chars) / static_cast<double>(sentences.size());
}

double vr(const TokenSequence& tokens) {
    require_tokens(tokens, "vr");
    return static_cast<double>(count_types(tokens).unique) / static_cast<double>(tokens.size());
}

double rr(const TokenSequence& tokens) {
    require_tokens(tokens, "rr");
    return static_cast<double>(count_types(tokens).repeated) / static_cast<double>(tokens.size());
}

StyloFeatures compute_features(const TokenSequence& tokens, const SentenceSegmentation& sentences) {
    StyloFeatures f;
    f.awl = awl(tokens);
    f.asl = asl(sentences);
    const auto types = count_types(tokens);
    f.n = tokens.size();
    f.m = sentences.size();
    f.unique_types = types.unique;
    f.repeated_types = types.repeated;
    f.vr = static_cast<double>(types.unique) / static_cast<double>(f.n);
    f.rr = static_cast<double>(types.repeated) / static_cast<double>(f.n);
    return f;
}

StyloFeatures feature_row(const Document& doc, PreprocessMode mode) {
    const std::string clean = preprocess(doc.raw_text, mode);
    const auto tokens = tokenize_words(clean);
    const auto sentences = split_sentences(clean);
    if (tokens.empty() || sentences.empty()) {
        throw UndefinedFeatureError("document " + doc.id +
                                    " has no words or sentences after preprocessing");
    }
    return compute_features(tokens, sentences);
}

std::vector<StyloFeatures> feature_rows(std::span<const Document> docs, PreprocessMode mode,
                                        int threads) {
    std::vector<StyloFeatures> rows(docs.size());
    FirstError errors(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] = feature_row(docs[static_cast<std::size_t>(i)], mode);
        } catch (...) {
            errors.capture(static_cast<std::size_t>(i));
        }
    }
    errors.rethrow();
    return rows;
}

std::vector<StyloFeatures> feature_rows_serial(std::span<const Document> docs, PreprocessMode mode) {
    std::vector<StyloFeatures> rows;
    rows.reserve(docs.size());
    for (const auto& doc : docs) {
        rows.push_back(feature_row(doc, mode));
    }
    return rows;
}

void write_features_tsv(std::ostream& out, std::span<const Document> docs,
                        std::span<const StyloFeatures> rows) {
    out << "id\tlanguage\tlabel\tawl\tasl\tvr\trr\n";
    char buf[128];
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& f = rows[i];
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\t%.6f", f.awl, f.asl, f.vr, f.rr);
        out << docs[i].id << '\t' << to_string(docs[i].language) << '\t' << docs[i].label.name()
            << '\t' << buf << '\n';
    }
}

} // namespace mgt
