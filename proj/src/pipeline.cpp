#include "mgt/pipeline.hpp"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"
#include "mgt/parallel.hpp"
#include "mgt/rng.hpp"
#include "mgt/stylometry.hpp"
#include "mgt/textseg.hpp"

#include <openssl/evp.h>

#include <filesystem>

namespace mgt {
namespace {

namespace fs = std::filesystem;

bool uses_embeddings(FeatureSet set) noexcept { return set != FeatureSet::stylo; }

std::vector<std::string> task_classes(Task task) {
    const auto names = class_names(task);
    return {names.begin(), names.end()};
}

} // namespace

std::string_view to_string(ModelKind kind) noexcept { return kind == ModelKind::logreg ? "logreg" : "gbdt"; }

ModelKind parse_model_kind(std::string_view text) {
    if (text == "logreg") {
        return ModelKind::logreg;
    }
    if (text == "gbdt") {
        return ModelKind::gbdt;
    }
    throw ValidationError("unknown model '" + std::string(text) + "'");
}

void PipelineConfig::set_seed(std::uint64_t seed) noexcept {
    embedding.rng_seed = mix_seed(seed, 101);
    train.linear.rng_seed = mix_seed(seed, 102);
    train.gbdt.rng_seed = mix_seed(seed, 103);
}

std::vector<std::uint32_t> labels_of(const Corpus& corpus) {
    std::vector<std::uint32_t> y;
    y.reserve(corpus.size());
    for (const auto& doc : corpus.documents) {
        y.push_back(doc.label.value);
    }
    return y;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string file_digest(const std::string& path) { return sha256_hex(binio::read_file(path)); }

TrainedPipeline TrainedPipeline::train(const Corpus& train, const PipelineConfig& config,
                                       std::shared_ptr<const EmbeddingModel> embeddings) {
    if (train.task != config.task) {
        throw ValidationError("training corpus task does not match the pipeline task");
    }
    if (train.empty()) {
        throw InsufficientDataError("empty training corpus");
    }
    TrainedPipeline p;
    p.metadata_.task = config.task;
    p.metadata_.features = config.features;
    p.metadata_.preprocess = config.preprocess;

    const auto stylo = feature_rows(train.documents, config.preprocess, config.threads);
    p.metadata_.scaler = FeatureScaler::fit(stylo);

    if (uses_embeddings(config.features)) {
        if (!embeddings) {
            auto emb_cfg = config.embedding;
            emb_cfg.preprocess = config.preprocess;
            embeddings = std::make_shared<const EmbeddingModel>(
                train_embeddings(train, emb_cfg, config.embedding_workers));
        } else if (embeddings->config().preprocess != config.preprocess) {
            throw ValidationError("embedding model was trained with preprocess mode " +
                                  std::string(to_string(embeddings->config().preprocess)));
        }
        p.embeddings_ = std::move(embeddings);
    }

    const auto x = p.featurize(train, config.threads);
    const auto y = labels_of(train);
    if (config.model == ModelKind::logreg) {
        p.classifier_ = train_linear(x, y, task_classes(config.task), config.train.linear);
    } else {
        p.classifier_ = train_gbdt(x, y, task_classes(config.task), config.train.gbdt, config.threads);
    }
    return p;
}

void TrainedPipeline::save(const std::string& model_path, const std::string& embeddings_path) const {
    ModelMetadata meta = metadata_;
    if (embeddings_) {
        if (embeddings_path.empty()) {
            throw ValidationError("an embedding path is required to save this pipeline");
        }
        const std::string bytes = embeddings_->serialize();
        std::error_code ec;
        const bool same = fs::exists(embeddings_path, ec) && fs::file_size(embeddings_path, ec) == bytes.size() &&
                          binio::read_file(embeddings_path) == bytes;
        if (!same) {
            binio::write_file(embeddings_path, bytes);
        }
        const auto model_dir = fs::absolute(model_path).parent_path();
        meta.embeddings_path = fs::proximate(fs::absolute(embeddings_path), model_dir).generic_string();
        meta.embeddings_digest = sha256_hex(bytes);
    }
    save_model(model_path, classifier_, meta);
}

TrainedPipeline TrainedPipeline::load(const std::string& model_path, const std::string& embeddings_override) {
    auto stored = load_model(model_path);
    if (!stored.metadata) {
        throw ValidationError(model_path + " carries no feature pipeline metadata");
    }
    TrainedPipeline p;
    p.classifier_ = std::move(stored.classifier);
    p.metadata_ = *stored.metadata;
    if (uses_embeddings(p.metadata_.features)) {
        std::string path = embeddings_override;
        if (path.empty()) {
            const fs::path stored_path{p.metadata_.embeddings_path};
            path = stored_path.is_absolute()
                       ? stored_path.string()
                       : (fs::absolute(model_path).parent_path() / stored_path).lexically_normal().string();
        }
        const std::string bytes = binio::read_file(path);
        if (sha256_hex(bytes) != p.metadata_.embeddings_digest) {
            throw ValidationError("embedding file " + path + " does not match the digest recorded in the model");
        }
        p.embeddings_ = std::make_shared<const EmbeddingModel>(EmbeddingModel::deserialize(bytes));
    }
    return p;
}

std::vector<double> TrainedPipeline::featurize_document(const Document& doc) const {
    const std::string clean = preprocess(doc.raw_text, metadata_.preprocess);
    const auto tokens = tokenize_words(clean);
    const auto sentences = split_sentences(clean);
    if (tokens.empty() || sentences.empty()) {
        throw UndefinedFeatureError("document " + doc.id + " has no words or sentences after preprocessing");
    }
    const auto stylo = compute_features(tokens, sentences);
    if (metadata_.features == FeatureSet::stylo) {
        const auto z = metadata_.scaler.transform(stylo);
        return {z.begin(), z.end()};
    }
    auto v = doc_vector(*embeddings_, tokens, stylo, metadata_.scaler).values;
    if (metadata_.features == FeatureSet::embed) {
        v.resize(embeddings_->dim());
    }
    return v;
}

FeatureMatrix TrainedPipeline::featurize(const Corpus& corpus, int threads) const {
    const std::size_t n = corpus.size();
    std::vector<std::vector<double>> rows(n);
    FirstError errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] = featurize_document(corpus.documents[static_cast<std::size_t>(i)]);
        } catch (...) {
            errors.capture(static_cast<std::size_t>(i));
        }
    }
    errors.rethrow();
    FeatureMatrix x;
    for (const auto& r : rows) {
        x.push_row(r);
    }
    return x;
}

FeatureMatrix TrainedPipeline::featurize_serial(const Corpus& corpus) const {
    FeatureMatrix x;
    for (const auto& doc : corpus.documents) {
        x.push_row(featurize_document(doc));
    }
    return x;
}

std::vector<Prediction> TrainedPipeline::predict(const Corpus& corpus, int threads) const {
    if (corpus.task != metadata_.task) {
        throw ValidationError("corpus task does not match the model task");
    }
    if (corpus.empty()) {
        return {};
    }
    return predict_batch(classifier_, featurize(corpus, threads), threads);
}

} // namespace mgt
