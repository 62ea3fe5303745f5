#pragma once

#include "mgt/corpus.hpp"
#include "mgt/textseg.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace mgt {

/// The four lexical-complexity measures of a document with the counts they derive from.
struct StyloFeatures {
    double awl{0.0};  ///< mean word length in code points
    double asl{0.0};  ///< mean sentence length in code points
    double vr{0.0};   ///< distinct types / n
    double rr{0.0};   ///< types occurring at least twice / n
    std::size_t n{0};
    std::size_t m{0};
    std::size_t unique_types{0};
    std::size_t repeated_types{0};

    std::array<double, 4> values() const noexcept { return {awl, asl, vr, rr}; }
};

inline constexpr std::array<std::string_view, 4> kStyloNames{"awl", "asl", "vr", "rr"};

double awl(const TokenSequence& tokens);
double asl(const SentenceSegmentation& sentences);
double vr(const TokenSequence& tokens);
double rr(const TokenSequence& tokens);

StyloFeatures compute_features(const TokenSequence& tokens, const SentenceSegmentation& sentences);

/// Preprocesses the raw text, segments it and computes all four measures.
/// Throws UndefinedFeatureError naming the document when no word or sentence remains.
StyloFeatures feature_row(const Document& doc, PreprocessMode mode);

/// OpenMP kernel over documents. Rows follow input order; the first failing document
/// (by position) determines the exception, as in the serial version.
std::vector<StyloFeatures> feature_rows(std::span<const Document> docs, PreprocessMode mode,
                                        int threads);

/// Serial reference for feature_rows.
std::vector<StyloFeatures> feature_rows_serial(std::span<const Document> docs, PreprocessMode mode);

/// TSV with columns id, language, label, awl, asl, vr, rr (6-decimal fixed point).
void write_features_tsv(std::ostream& out, std::span<const Document> docs,
                        std::span<const StyloFeatures> rows);

} // namespace mgt
