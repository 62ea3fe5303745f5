#pragma once

#include "mgt/corpus.hpp"
#include "mgt/embeddings.hpp"
#include "mgt/model_io.hpp"
#include "mgt/models.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mgt {

enum class ModelKind : std::uint8_t { logreg, gbdt };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

struct PipelineConfig {
    Task task{Task::detection};
    FeatureSet features{FeatureSet::both};
    PreprocessMode preprocess{PreprocessMode::unicode_letters};
    ModelKind model{ModelKind::logreg};
    EmbeddingConfig embedding;
    TrainConfig train;
    /// OpenMP workers for document featurisation, split search and batch prediction.
    int threads{1};
    /// Embedding training workers; 1 keeps training bit-reproducible.
    int embedding_workers{1};

    /// Derives the embedding, linear and boosting seeds from one user seed.
    void set_seed(std::uint64_t seed) noexcept;
};

/// Classifier plus everything needed to turn raw documents into its inputs.
class TrainedPipeline {
public:
    /// Fits the scaler, trains (or reuses) embeddings and trains the classifier on `train`.
    static TrainedPipeline train(const Corpus& train, const PipelineConfig& config,
                                 std::shared_ptr<const EmbeddingModel> embeddings = nullptr);

    /// Restores a saved pipeline. `embeddings_override` replaces the path stored in the model.
    static TrainedPipeline load(const std::string& model_path, const std::string& embeddings_override = {});

    /// Writes the classifier (and, when `embeddings_path` is non-empty and embeddings are
    /// used, the embedding model) and records the embedding path and digest in the model.
    void save(const std::string& model_path, const std::string& embeddings_path) const;

    /// OpenMP kernel over documents; rows follow corpus order.
    FeatureMatrix featurize(const Corpus& corpus, int threads) const;
    /// Serial reference for featurize.
    FeatureMatrix featurize_serial(const Corpus& corpus) const;

    std::vector<Prediction> predict(const Corpus& corpus, int threads) const;

    const Classifier& classifier() const noexcept { return classifier_; }
    const ModelMetadata& metadata() const noexcept { return metadata_; }
    const std::shared_ptr<const EmbeddingModel>& embeddings() const noexcept { return embeddings_; }

private:
    std::vector<double> featurize_document(const Document& doc) const;

    Classifier classifier_;
    ModelMetadata metadata_;
    std::shared_ptr<const EmbeddingModel> embeddings_;
};

/// Class indices of every document, in order.
std::vector<std::uint32_t> labels_of(const Corpus& corpus);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);
std::string sha256_hex(std::string_view bytes);

} // namespace mgt
