#pragma once

#include "mgt/corpus.hpp"
#include "mgt/embeddings.hpp"
#include "mgt/models.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace mgt {

enum class FeatureSet : std::uint8_t { stylo, embed, both };

std::string_view to_string(FeatureSet set) noexcept;
FeatureSet parse_feature_set(std::string_view text);

/// How raw documents become classifier inputs; stored next to the parameters so a
/// saved model can be evaluated on new text.
struct ModelMetadata {
    Task task{Task::detection};
    FeatureSet features{FeatureSet::both};
    PreprocessMode preprocess{PreprocessMode::unicode_letters};
    FeatureScaler scaler;
    std::string embeddings_path;    ///< empty for FeatureSet::stylo
    std::string embeddings_digest;  ///< hex SHA-256 of the embedding file
};

struct StoredModel {
    Classifier classifier;
    std::optional<ModelMetadata> metadata;
};

/// Container: "MGTM", u32 version, u32 kind (1 linear, 2 ensemble), config block,
/// class list, parameter blocks, optional metadata block, trailing CRC32.
std::string serialize_model(const Classifier& model, const std::optional<ModelMetadata>& metadata = {});
StoredModel deserialize_model(std::string_view bytes);

void save_model(const std::string& path, const Classifier& model,
                const std::optional<ModelMetadata>& metadata = {});
StoredModel load_model(const std::string& path);

} // namespace mgt
