#include "mgt/synthetic.hpp"

#include "mgt/errors.hpp"
#include "mgt/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace mgt {
namespace {

struct AuthorProfile {
    double syllables;         ///< mean syllables per word
    std::size_t vocabulary;   ///< private word list size; small lists repeat more
    double zipf;              ///< exponent of the word-rank distribution
    std::size_t min_sentence;
    std::size_t max_sentence;
};

constexpr std::array<AuthorProfile, 2> kDetectionAuthors{{
    {1.5, 70, 1.15, 7, 13},    // generated
    {2.9, 1400, 0.85, 9, 17},  // human
}};

constexpr std::array<AuthorProfile, 6> kAttributionAuthors{{
    {1.5, 60, 1.2, 7, 12},
    {1.8, 120, 1.1, 8, 13},
    {2.1, 240, 1.0, 9, 14},
    {2.4, 480, 0.95, 10, 15},
    {2.7, 900, 0.9, 11, 16},
    {3.0, 1600, 0.85, 12, 17},
}};

constexpr std::array<std::string_view, 24> kEnglishCommon{
    "the", "of", "and", "to", "a", "in", "is", "it", "that", "was", "for", "on",
    "with", "as", "he", "she", "at", "by", "this", "we", "you", "or", "but", "not"};

constexpr std::array<std::string_view, 24> kSpanishCommon{
    "el", "la", "de", "que", "y", "en", "un", "una", "es", "se", "no", "por",
    "con", "para", "los", "las", "del", "más", "como", "pero", "sí", "ya", "también", "él"};

std::vector<std::string_view> onsets(Language lang) {
    if (lang == Language::en) {
        return {"b", "c", "d", "f", "g", "h", "l", "m", "n", "p", "r", "s", "t", "v", "w",
                "br", "ch", "cl", "dr", "fl", "gr", "pl", "sh", "st", "th", "tr"};
    }
    return {"b", "c", "d", "f", "g", "j", "l", "m", "n", "ñ", "p", "r", "s", "t", "v",
            "br", "ch", "cl", "cr", "gr", "ll", "pr", "rr", "tr"};
}

std::vector<std::string_view> nuclei(Language lang) {
    if (lang == Language::en) {
        return {"a", "e", "i", "o", "u", "ea", "oo", "ai", "ou"};
    }
    return {"a", "e", "i", "o", "u", "á", "é", "í", "ó", "ú", "ie", "ue"};
}

std::string make_word(Language lang, std::size_t syllables, Rng& rng) {
    const auto on = onsets(lang);
    const auto nu = nuclei(lang);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
        w += on[rng.below(on.size())];
        w += nu[rng.below(nu.size())];
    }
    if (rng.uniform() < 0.3) {
        w += lang == Language::en ? "s" : "n";
    }
    return w;
}

std::size_t draw_syllables(double mean, Rng& rng) {
    // Box-Muller normal around the profile mean, clamped to [1, 5].
    const double u1 = std::max(rng.uniform(), 1e-12);
    const double u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    const double v = std::round(mean + 0.6 * z);
    return static_cast<std::size_t>(std::clamp(v, 1.0, 5.0));
}

/// Cumulative Zipf weights over ranks 1..n.
std::vector<double> zipf_cdf(std::size_t n, double exponent) {
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
        cdf[r] = acc;
    }
    return cdf;
}

std::size_t draw_rank(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform() * cdf.back();
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

std::string capitalize(const std::string& w) {
    std::string out = w;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    }
    return out;
}

} // namespace

Corpus synthetic_corpus(const SyntheticConfig& config) {
    if (config.languages.empty() || config.docs_per_language == 0) {
        throw ValidationError("synthetic corpus needs at least one language and one document");
    }
    const auto authors = config.task == Task::detection
                             ? std::span<const AuthorProfile>(kDetectionAuthors)
                             : std::span<const AuthorProfile>(kAttributionAuthors);
    Corpus corpus;
    corpus.task = config.task;
    for (auto lang : config.languages) {
        Rng rng{mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(lang))};
        std::vector<std::vector<std::string>> lexicons;
        std::vector<std::vector<double>> cdfs;
        for (const auto& author : authors) {
            std::set<std::string> seen;
            std::vector<std::string> words;
            while (words.size() < author.vocabulary) {
                auto w = make_word(lang, draw_syllables(author.syllables, rng), rng);
                if (seen.insert(w).second) {
                    words.push_back(std::move(w));
                }
            }
            lexicons.push_back(std::move(words));
            cdfs.push_back(zipf_cdf(author.vocabulary, author.zipf));
        }
        const auto common = lang == Language::en ? std::span<const std::string_view>(kEnglishCommon)
                                                 : std::span<const std::string_view>(kSpanishCommon);
        const auto common_cdf = zipf_cdf(common.size(), 1.0);

        for (std::size_t d = 0; d < config.docs_per_language; ++d) {
            const std::size_t a = d % authors.size();
            const auto& author = authors[a];
            const std::size_t sentences = 3 + static_cast<std::size_t>(rng.below(5));
            std::string text;
            for (std::size_t s = 0; s < sentences; ++s) {
                const std::size_t len =
                    author.min_sentence + static_cast<std::size_t>(rng.below(author.max_sentence - author.min_sentence + 1));
                for (std::size_t w = 0; w < len; ++w) {
                    std::string word = rng.uniform() < config.shared_word_rate
                                           ? std::string(common[draw_rank(common_cdf, rng)])
                                           : lexicons[a][draw_rank(cdfs[a], rng)];
                    if (w == 0) {
                        word = capitalize(word);
                    }
                    if (!text.empty()) {
                        text += rng.uniform() < 0.03 ? "  " : " ";
                    }
                    text += word;
                    if (w + 1 < len && rng.uniform() < 0.06) {
                        text += ",";
                    }
                    if (rng.uniform() < 0.01) {
                        text += "\xE2\x84\xA2";  // U+2122, removed by preprocessing
                    }
                }
                const double t = rng.uniform();
                text += t < 0.8 ? "." : (t < 0.9 ? "!" : "?");
            }
            Document doc;
            char id[48];
            std::snprintf(id, sizeof id, "%s-%s-%05zu", std::string(to_string(lang)).c_str(),
                          config.task == Task::detection ? "det" : "att", d);
            doc.id = id;
            doc.language = lang;
            doc.label = TaskLabel{config.task, static_cast<std::uint8_t>(a)};
            doc.raw_text = std::move(text);
            corpus.documents.push_back(std::move(doc));
        }
    }
    return corpus;
}

} // namespace mgt
