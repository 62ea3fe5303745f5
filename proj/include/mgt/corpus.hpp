#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mgt {

enum class Language : std::uint8_t { en, es };
enum class Task : std::uint8_t { detection, attribution };
enum class SplitTag : std::uint8_t { train, valid, test, unsplit };
enum class PreprocessMode : std::uint8_t { strict_ascii, unicode_letters };

std::string_view to_string(Language lang) noexcept;
std::string_view to_string(Task task) noexcept;
std::string_view to_string(SplitTag tag) noexcept;
std::string_view to_string(PreprocessMode mode) noexcept;

Language parse_language(std::string_view text);
Task parse_task(std::string_view text);
/// Accepts "strict-ascii"/"strict_ascii" and "unicode"/"unicode_letters".
PreprocessMode parse_preprocess_mode(std::string_view text);

/// Ordered label names of a task: {generated, human} or {A, ..., F}.
std::span<const std::string_view> class_names(Task task) noexcept;
std::size_t class_count(Task task) noexcept;

/// A label bound to its task. `value` indexes class_names(task).
struct TaskLabel {
    /// Marks a document read with unknown gold label ("?"), only accepted when asked for.
    static constexpr std::uint8_t kUnlabeled = 0xFF;

    Task task{Task::detection};
    std::uint8_t value{0};

    static TaskLabel parse(Task task, std::string_view name);
    std::string_view name() const noexcept;
    bool known() const noexcept { return value != kUnlabeled; }

    friend bool operator==(const TaskLabel&, const TaskLabel&) = default;
};

struct Document {
    std::string id;
    Language language{Language::en};
    TaskLabel label;
    std::string raw_text;
    std::string clean_text;
};

struct Corpus {
    Task task{Task::detection};
    std::vector<Document> documents;
    SplitTag split_tag{SplitTag::unsplit};

    std::size_t size() const noexcept { return documents.size(); }
    bool empty() const noexcept { return documents.empty(); }
};

/// Throws ValidationError when ids repeat, a text is empty, or a label belongs to another task.
void validate(const Corpus& corpus);

/// Reads canonical TSV (id, language, label, text). A first line equal to the header
/// "id\tlanguage\tlabel\ttext" is skipped. With `allow_unlabeled`, a label of "?" is read
/// as TaskLabel::kUnlabeled.
Corpus parse_tsv(std::istream& in, Task task, bool allow_unlabeled = false);

/// Opens `path` (gzip-decompressed when it ends in ".gz") and parses it.
Corpus read_corpus(const std::string& path, Task task, bool allow_unlabeled = false);

/// Writes the header line followed by one row per document with its raw text.
void write_tsv(std::ostream& out, const Corpus& corpus);

/// Keeps ASCII letters (strict_ascii) or Unicode letters (unicode_letters), digits,
/// and the punctuation set . ! ? , ; : ' "; every other character is removed,
/// whitespace runs become one space and the result is trimmed.
std::string preprocess(std::string_view raw_text, PreprocessMode mode);

bool is_sentence_punctuation(char32_t cp) noexcept;

/// Fills clean_text of every document.
void preprocess_corpus(Corpus& corpus, PreprocessMode mode);

struct SplitFractions {
    double train{1.0};
    double valid{0.0};
    double test{0.0};
};

struct SplitCorpus {
    Corpus train;
    Corpus valid;
    Corpus test;
};

/// Stratified by label and deterministic in `seed`. Each split keeps the input order.
SplitCorpus split_corpus(const Corpus& corpus, SplitFractions fractions, std::uint64_t seed);

/// Concatenates the two corpora, keeping language tags. Tasks must match.
Corpus merge_bilingual(const Corpus& en, const Corpus& es);

/// Documents of `corpus` whose language is in `languages`, in order.
Corpus filter_languages(const Corpus& corpus, std::span<const Language> languages);

} // namespace mgt
