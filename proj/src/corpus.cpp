#include "mgt/corpus.hpp"

#include "mgt/errors.hpp"
#include "mgt/rng.hpp"
#include "mgt/utf8.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mgt {
namespace {

constexpr std::array<std::string_view, 2> kDetectionNames{"generated", "human"};
constexpr std::array<std::string_view, 6> kAttributionNames{"A", "B", "C", "D", "E", "F"};
constexpr std::string_view kHeader = "id\tlanguage\tlabel\ttext";

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string read_gzip(const std::string& path) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) {
        throw IoError("cannot open " + path);
    }
    std::string data;
    std::array<char, 1 << 16> buffer{};
    for (;;) {
        const int n = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()));
        if (n < 0) {
            int code = 0;
            const std::string msg = gzerror(file, &code);
            gzclose(file);
            throw IoError("gzip read failed for " + path + ": " + msg);
        }
        if (n == 0) {
            break;
        }
        data.append(buffer.data(), static_cast<std::size_t>(n));
    }
    gzclose(file);
    return data;
}

} // namespace

std::string_view to_string(Language lang) noexcept { return lang == Language::en ? "en" : "es"; }

std::string_view to_string(Task task) noexcept {
    return task == Task::detection ? "detection" : "attribution";
}

std::string_view to_string(SplitTag tag) noexcept {
    switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::valid: return "valid";
    case SplitTag::test: return "test";
    case SplitTag::unsplit: break;
    }
    return "unsplit";
}

std::string_view to_string(PreprocessMode mode) noexcept {
    return mode == PreprocessMode::strict_ascii ? "strict-ascii" : "unicode";
}

Language parse_language(std::string_view text) {
    if (text == "en") {
        return Language::en;
    }
    if (text == "es") {
        return Language::es;
    }
    throw ValidationError("unknown language '" + std::string(text) + "'");
}

Task parse_task(std::string_view text) {
    if (text == "detection") {
        return Task::detection;
    }
    if (text == "attribution") {
        return Task::attribution;
    }
    throw ValidationError("unknown task '" + std::string(text) + "'");
}

PreprocessMode parse_preprocess_mode(std::string_view text) {
    if (text == "strict-ascii" || text == "strict_ascii") {
        return PreprocessMode::strict_ascii;
    }
    if (text == "unicode" || text == "unicode_letters") {
        return PreprocessMode::unicode_letters;
    }
    throw ValidationError("unknown preprocess mode '" + std::string(text) + "'");
}

std::span<const std::string_view> class_names(Task task) noexcept {
    if (task == Task::detection) {
        return kDetectionNames;
    }
    return kAttributionNames;
}

std::size_t class_count(Task task) noexcept { return class_names(task).size(); }

TaskLabel TaskLabel::parse(Task task, std::string_view name) {
    const auto names = class_names(task);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return TaskLabel{task, static_cast<std::uint8_t>(i)};
        }
    }
    throw ValidationError("label '" + std::string(name) + "' is not a valid " +
                          std::string(to_string(task)) + " label");
}

std::string_view TaskLabel::name() const noexcept { return known() ? class_names(task)[value] : "?"; }

void validate(const Corpus& corpus) {
    std::unordered_set<std::string_view> ids;
    ids.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        if (doc.id.empty()) {
            throw ValidationError("document with empty id");
        }
        if (doc.raw_text.empty()) {
            throw ValidationError("document " + doc.id + " has empty text");
        }
        if (doc.label.task != corpus.task || doc.label.value >= class_count(corpus.task)) {
            throw ValidationError("document " + doc.id + " has a label outside the " +
                                  std::string(to_string(corpus.task)) + " task");
        }
        if (!ids.insert(doc.id).second) {
            throw ValidationError("duplicate document id " + doc.id);
        }
    }
}

Corpus parse_tsv(std::istream& in, Task task, bool allow_unlabeled) {
    Corpus corpus;
    corpus.task = task;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line == kHeader) {
            continue;
        }
        if (std::count(line.begin(), line.end(), '\t') != 3) {
            throw ParseError(line_no, "expected 4 tab-separated fields");
        }
        std::array<std::string_view, 4> fields;
        const std::string_view view = line;
        std::size_t begin = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            const std::size_t end = i < 3 ? view.find('\t', begin) : view.size();
            fields[i] = view.substr(begin, end - begin);
            begin = end + 1;
        }
        if (fields[0].empty()) {
            throw ParseError(line_no, "empty id");
        }
        if (fields[3].empty()) {
            throw ParseError(line_no, "empty text");
        }
        Document doc;
        doc.id = std::string(fields[0]);
        try {
            doc.language = parse_language(fields[1]);
            doc.label = allow_unlabeled && fields[2] == "?" ? TaskLabel{task, TaskLabel::kUnlabeled}
                                                            : TaskLabel::parse(task, fields[2]);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(doc.id).second) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate id " + doc.id);
        }
        doc.raw_text = std::string(fields[3]);
        corpus.documents.push_back(std::move(doc));
    }
    if (in.bad()) {
        throw IoError("read failure while parsing corpus");
    }
    return corpus;
}

Corpus read_corpus(const std::string& path, Task task, bool allow_unlabeled) {
    if (ends_with(path, ".gz")) {
        std::istringstream in(read_gzip(path));
        return parse_tsv(in, task, allow_unlabeled);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return parse_tsv(in, task, allow_unlabeled);
}

void write_tsv(std::ostream& out, const Corpus& corpus) {
    out << kHeader << '\n';
    for (const auto& doc : corpus.documents) {
        out << doc.id << '\t' << to_string(doc.language) << '\t' << doc.label.name() << '\t'
            << doc.raw_text << '\n';
    }
}

bool is_sentence_punctuation(char32_t cp) noexcept {
    switch (cp) {
    case U'.':
    case U'!':
    case U'?':
    case U',':
    case U';':
    case U':':
    case U'\'':
    case U'"':
        return true;
    default:
        return false;
    }
}

std::string preprocess(std::string_view raw_text, PreprocessMode mode) {
    std::string out;
    out.reserve(raw_text.size());
    bool pending_space = false;
    for (std::size_t pos = 0; pos < raw_text.size();) {
        const char32_t cp = utf8::decode(raw_text, pos);
        if (utf8::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        bool keep = false;
        if (mode == PreprocessMode::strict_ascii) {
            keep = cp < 0x80 && (utf8::is_letter(cp) || utf8::is_digit(cp) ||
                                 is_sentence_punctuation(cp));
        } else {
            keep = utf8::is_letter(cp) || utf8::is_digit(cp) || is_sentence_punctuation(cp);
        }
        if (!keep) {
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        utf8::append(out, cp);
    }
    return out;
}

void preprocess_corpus(Corpus& corpus, PreprocessMode mode) {
    for (auto& doc : corpus.documents) {
        doc.clean_text = preprocess(doc.raw_text, mode);
    }
}

SplitCorpus split_corpus(const Corpus& corpus, SplitFractions fractions, std::uint64_t seed) {
    const std::array<double, 3> f{fractions.train, fractions.valid, fractions.test};
    for (double v : f) {
        if (!(v >= 0.0) || v > 1.0) {
            throw ValidationError("split fractions must lie in [0, 1]");
        }
    }
    if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
        throw ValidationError("split fractions must sum to 1");
    }
    if (corpus.empty()) {
        throw InsufficientDataError("cannot split an empty corpus");
    }

    const std::size_t k = class_count(corpus.task);
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        by_class[corpus.documents[i].label.value].push_back(i);
    }

    std::vector<std::uint8_t> assignment(corpus.documents.size(), 0);
    for (std::size_t c = 0; c < k; ++c) {
        auto& members = by_class[c];
        if (members.empty()) {
            continue;
        }
        Rng rng{mix_seed(seed, c)};
        rng.shuffle(std::span<std::size_t>(members));
        const auto n = static_cast<long long>(members.size());
        long long n_train = std::llround(f[0] * static_cast<double>(n));
        long long n_valid = std::llround(f[1] * static_cast<double>(n));
        if (n_train + n_valid > n) {
            n_valid = std::max(0LL, n - n_train);
        }
        if (n_train > n) {
            n_train = n;
        }
        long long n_test = n - n_train - n_valid;
        if (f[2] == 0.0 && n_test > 0) {
            n_train += n_test;
            n_test = 0;
        }
        const std::array<long long, 3> counts{n_train, n_valid, n_test};
        for (std::size_t s = 0; s < 3; ++s) {
            if (f[s] > 0.0 && counts[s] == 0) {
                throw InsufficientDataError(
                    "class " + std::string(class_names(corpus.task)[c]) + " has too few documents (" +
                    std::to_string(n) + ") to populate every split");
            }
        }
        for (long long i = 0; i < n; ++i) {
            const auto s = i < n_train ? 0 : (i < n_train + n_valid ? 1 : 2);
            assignment[members[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(s);
        }
    }

    SplitCorpus out;
    std::array<Corpus*, 3> parts{&out.train, &out.valid, &out.test};
    const std::array<SplitTag, 3> tags{SplitTag::train, SplitTag::valid, SplitTag::test};
    for (std::size_t s = 0; s < 3; ++s) {
        parts[s]->task = corpus.task;
        parts[s]->split_tag = tags[s];
    }
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        parts[assignment[i]]->documents.push_back(corpus.documents[i]);
    }
    return out;
}

Corpus merge_bilingual(const Corpus& en, const Corpus& es) {
    if (en.task != es.task) {
        throw ValidationError("cannot merge corpora of different tasks");
    }
    Corpus merged;
    merged.task = en.task;
    merged.split_tag = en.split_tag == es.split_tag ? en.split_tag : SplitTag::unsplit;
    if (es.empty()) {
        merged.split_tag = en.split_tag;
    } else if (en.empty()) {
        merged.split_tag = es.split_tag;
    }
    merged.documents.reserve(en.size() + es.size());
    merged.documents.insert(merged.documents.end(), en.documents.begin(), en.documents.end());
    merged.documents.insert(merged.documents.end(), es.documents.begin(), es.documents.end());
    validate(merged);
    return merged;
}

Corpus filter_languages(const Corpus& corpus, std::span<const Language> languages) {
    Corpus out;
    out.task = corpus.task;
    out.split_tag = corpus.split_tag;
    for (const auto& doc : corpus.documents) {
        if (std::find(languages.begin(), languages.end(), doc.language) != languages.end()) {
            out.documents.push_back(doc);
        }
    }
    return out;
}

} // namespace mgt
