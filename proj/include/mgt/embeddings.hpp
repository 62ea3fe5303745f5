#pragma once

#include "mgt/corpus.hpp"
#include "mgt/stylometry.hpp"
#include "mgt/textseg.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mgt {

struct EmbeddingConfig {
    std::uint32_t dim{100};
    std::uint32_t window{5};
    std::uint32_t negatives{5};
    std::uint32_t epochs{5};
    std::uint32_t min_count{2};
    std::uint32_t ngram_min{3};
    std::uint32_t ngram_max{6};
    std::uint32_t bucket_count{2'000'000};
    double initial_lr{0.025};
    std::uint64_t rng_seed{0};
    /// Recorded so downstream artifacts know how their text was cleaned.
    PreprocessMode preprocess{PreprocessMode::unicode_letters};

    /// Zero epochs are allowed (the model stays at its initialisation); every other count
    /// must be positive and ngram_min <= ngram_max.
    void validate() const;
};

/// Retained words ordered by descending frequency, ties broken lexicographically.
class Vocab {
public:
    struct Entry {
        std::string word;
        std::uint64_t count{0};
    };

    Vocab() = default;
    Vocab(std::vector<Entry> entries, std::uint64_t total_tokens);

    std::optional<std::uint32_t> index(std::string_view word) const;
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    /// Tokens counted while building, including those below min_count.
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    std::span<const Entry> entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t total_tokens_{0};
};

/// Tokens of a document's clean_text, or of its preprocessed raw text when clean_text is empty.
TokenSequence document_tokens(const Document& doc, PreprocessMode mode);

Vocab build_vocab(const Corpus& corpus, const EmbeddingConfig& config);

/// FNV-1a, 32-bit.
std::uint32_t fnv1a32(std::string_view bytes) noexcept;

/// Bucket rows for the character n-grams of "<word>", already offset by `vocab_size`.
std::vector<std::uint32_t> subword_ids(std::string_view word, const EmbeddingConfig& config,
                                       std::size_t vocab_size);

/// One skip-gram example with fixed negatives, for loss evaluation on frozen batches.
struct SkipGramExample {
    std::uint32_t center{0};
    std::uint32_t context{0};
    std::vector<std::uint32_t> negatives;
};

class EmbeddingModel {
public:
    EmbeddingModel() = default;

    /// Input rows uniform in (-1/dim, 1/dim) drawn from config.rng_seed; output rows zero.
    static EmbeddingModel initialize(EmbeddingConfig config, Vocab vocab);

    const EmbeddingConfig& config() const noexcept { return config_; }
    const Vocab& vocab() const noexcept { return vocab_; }
    std::size_t dim() const noexcept { return config_.dim; }
    std::size_t input_rows() const noexcept { return vocab_.size() + config_.bucket_count; }
    std::size_t output_rows() const noexcept { return vocab_.size(); }

    std::span<const float> input_row(std::size_t row) const;
    std::span<float> input_row(std::size_t row);
    std::span<const float> output_row(std::size_t row) const;
    std::span<float> output_row(std::size_t row);
    std::span<const float> input_matrix() const noexcept { return input_; }
    std::span<const float> output_matrix() const noexcept { return output_; }

    /// Input rows composing a vocabulary word: its own row followed by its n-gram buckets.
    std::span<const std::uint32_t> word_rows(std::uint32_t word_index) const;

    /// Mean of the word's own row (when in vocabulary) and its n-gram bucket rows.
    /// A word with no rows at all yields the zero vector.
    std::vector<double> word_vector(std::string_view word) const;

    /// Mean negative-sampling logistic loss of the given examples.
    double skipgram_loss(std::span<const SkipGramExample> batch) const;

    bool all_finite() const noexcept;

    std::string serialize() const;
    static EmbeddingModel deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static EmbeddingModel load(const std::string& path);

    friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
        return a.input_ == b.input_ && a.output_ == b.output_;
    }

private:
    void index_subwords();

    friend class SkipGramTrainer;

    EmbeddingConfig config_;
    Vocab vocab_;
    std::vector<float> input_;
    std::vector<float> output_;
    std::vector<std::uint32_t> word_rows_;
    std::vector<std::size_t> word_rows_offset_;
};

struct EmbeddingTrainLog {
    /// Mean skip-gram loss per (center, context) pair, one entry per epoch.
    std::vector<double> epoch_loss;
};

/// Skip-gram with negative sampling over subword-composed centre vectors.
/// workers == 1 is the deterministic reference; workers > 1 applies unsynchronised
/// updates from an OpenMP team and is not bit-reproducible.
EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config, int workers = 1,
                                EmbeddingTrainLog* log = nullptr);

/// Continues training an initialised model; exposed so tests can measure single epochs.
void train_epochs(EmbeddingModel& model, const Corpus& corpus, std::uint32_t epochs, int workers,
                  EmbeddingTrainLog* log = nullptr);

/// Draws a frozen batch of skip-gram examples from the corpus using the model's
/// negative distribution.
std::vector<SkipGramExample> sample_skipgram_batch(const EmbeddingModel& model, const Corpus& corpus,
                                                   std::size_t count, std::uint64_t seed);

/// z-score parameters of the four stylometric columns, fitted on a training split.
struct FeatureScaler {
    std::array<double, 4> mean{};
    std::array<double, 4> stddev{1.0, 1.0, 1.0, 1.0};
    /// Columns with zero spread; they map to 0.
    std::array<bool, 4> constant{};

    static FeatureScaler fit(std::span<const StyloFeatures> rows);
    std::array<double, 4> transform(const StyloFeatures& f) const noexcept;
};

/// Mean word vector followed by the four standardised stylometric values.
struct DocVector {
    std::vector<double> values;
};

DocVector doc_vector(const EmbeddingModel& model, const TokenSequence& tokens,
                     const StyloFeatures& stylo, const FeatureScaler& scaler);

} // namespace mgt
