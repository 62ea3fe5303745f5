#include "mgt/model_io.hpp"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"

namespace mgt {
namespace {

constexpr std::string_view kMagic = "MGTM";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindLinear = 1;
constexpr std::uint32_t kKindEnsemble = 2;

void put_classes(binio::ByteWriter& w, const std::vector<std::string>& classes) {
    w.put_u32(static_cast<std::uint32_t>(classes.size()));
    for (const auto& c : classes) {
        w.put_string(c);
    }
}

std::vector<std::string> get_classes(binio::ByteReader& r) {
    const auto k = r.get_u32();
    if (k < 2 || k > 64) {
        throw FormatError("implausible class count " + std::to_string(k));
    }
    std::vector<std::string> classes;
    for (std::uint32_t i = 0; i < k; ++i) {
        classes.push_back(r.get_string());
    }
    return classes;
}

void put_doubles(binio::ByteWriter& w, std::span<const double> values) {
    w.put_u64(values.size());
    for (double v : values) {
        w.put_f64(v);
    }
}

std::vector<double> get_doubles(binio::ByteReader& r) {
    const auto n = r.get_u64();
    if (n > r.remaining() / 8) {
        throw FormatError("array length exceeds file size");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) {
        v = r.get_f64();
    }
    return out;
}

void write_linear(binio::ByteWriter& w, const LinearModel& m) {
    const auto& cfg = m.config();
    w.put_u32(static_cast<std::uint32_t>(m.dim()));
    w.put_f64(m.l2_lambda());
    w.put_u32(cfg.epochs);
    w.put_u32(cfg.batch_size);
    w.put_f64(cfg.learning_rate);
    w.put_u64(cfg.rng_seed);
    put_classes(w, m.classes());
    put_doubles(w, m.weights());
    put_doubles(w, m.bias());
    put_doubles(w, m.epoch_loss());
}

LinearModel read_linear(binio::ByteReader& r) {
    const auto dim = r.get_u32();
    const double lambda = r.get_f64();
    LinearConfig cfg;
    cfg.epochs = r.get_u32();
    cfg.batch_size = r.get_u32();
    cfg.learning_rate = r.get_f64();
    cfg.rng_seed = r.get_u64();
    cfg.l2_lambda = lambda;
    LinearModel m{get_classes(r), dim, lambda};
    m.config() = cfg;
    const auto weights = get_doubles(r);
    const auto bias = get_doubles(r);
    if (weights.size() != m.weights().size() || bias.size() != m.bias().size()) {
        throw FormatError("linear parameter block has the wrong shape");
    }
    std::copy(weights.begin(), weights.end(), m.weights().begin());
    std::copy(bias.begin(), bias.end(), m.bias().begin());
    m.epoch_loss() = get_doubles(r);
    return m;
}

void write_ensemble(binio::ByteWriter& w, const TreeEnsemble& m) {
    const auto& cfg = m.config();
    w.put_u32(static_cast<std::uint32_t>(m.dim()));
    w.put_u32(cfg.rounds);
    w.put_u32(cfg.max_depth);
    w.put_f64(cfg.eta);
    w.put_f64(cfg.lambda);
    w.put_f64(cfg.gamma);
    w.put_f64(cfg.min_child_weight);
    w.put_f64(cfg.base_score);
    w.put_u64(cfg.rng_seed);
    put_classes(w, m.classes());
    w.put_u32(static_cast<std::uint32_t>(m.trees().size()));
    for (const auto& tree : m.trees()) {
        w.put_u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            w.put_u32(static_cast<std::uint32_t>(node.feature));
            w.put_f64(node.threshold);
            w.put_u32(node.left);
            w.put_u32(node.right);
            w.put_f64(node.value);
        }
    }
    put_doubles(w, m.train_loss());
}

TreeEnsemble read_ensemble(binio::ByteReader& r) {
    const auto dim = r.get_u32();
    GbdtConfig cfg;
    cfg.rounds = r.get_u32();
    cfg.max_depth = r.get_u32();
    cfg.eta = r.get_f64();
    cfg.lambda = r.get_f64();
    cfg.gamma = r.get_f64();
    cfg.min_child_weight = r.get_f64();
    cfg.base_score = r.get_f64();
    cfg.rng_seed = r.get_u64();
    TreeEnsemble m{get_classes(r), dim, cfg};
    const auto trees = r.get_u32();
    if (trees % m.num_classes() != 0) {
        throw FormatError("tree count is not a multiple of the class count");
    }
    for (std::uint32_t t = 0; t < trees; ++t) {
        RegressionTree tree;
        const auto nodes = r.get_u32();
        if (nodes == 0 || nodes > r.remaining() / 28) {
            throw FormatError("invalid tree node count");
        }
        tree.nodes.resize(nodes);
        for (auto& node : tree.nodes) {
            node.feature = static_cast<std::int32_t>(r.get_u32());
            node.threshold = r.get_f64();
            node.left = r.get_u32();
            node.right = r.get_u32();
            node.value = r.get_f64();
        }
        // Children always follow their parent, so every walk terminates.
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            if (!node.is_leaf() &&
                (static_cast<std::size_t>(node.feature) >= dim || node.left <= i || node.right <= i ||
                 node.left >= nodes || node.right >= nodes)) {
                throw FormatError("tree structure is inconsistent");
            }
        }
        m.trees().push_back(std::move(tree));
    }
    m.train_loss() = get_doubles(r);
    return m;
}

void write_metadata(binio::ByteWriter& w, const std::optional<ModelMetadata>& meta) {
    w.put_u8(meta ? 1 : 0);
    if (!meta) {
        return;
    }
    w.put_u8(static_cast<std::uint8_t>(meta->task));
    w.put_u8(static_cast<std::uint8_t>(meta->features));
    w.put_u8(static_cast<std::uint8_t>(meta->preprocess));
    for (std::size_t j = 0; j < 4; ++j) {
        w.put_f64(meta->scaler.mean[j]);
        w.put_f64(meta->scaler.stddev[j]);
        w.put_u8(meta->scaler.constant[j] ? 1 : 0);
    }
    w.put_string(meta->embeddings_path);
    w.put_string(meta->embeddings_digest);
}

std::optional<ModelMetadata> read_metadata(binio::ByteReader& r) {
    const auto present = r.get_u8();
    if (present == 0) {
        return std::nullopt;
    }
    ModelMetadata meta;
    const auto task = r.get_u8();
    const auto features = r.get_u8();
    const auto mode = r.get_u8();
    if (task > 1 || features > 2 || mode > 1) {
        throw FormatError("invalid model metadata enums");
    }
    meta.task = static_cast<Task>(task);
    meta.features = static_cast<FeatureSet>(features);
    meta.preprocess = static_cast<PreprocessMode>(mode);
    for (std::size_t j = 0; j < 4; ++j) {
        meta.scaler.mean[j] = r.get_f64();
        meta.scaler.stddev[j] = r.get_f64();
        meta.scaler.constant[j] = r.get_u8() != 0;
    }
    meta.embeddings_path = r.get_string();
    meta.embeddings_digest = r.get_string();
    return meta;
}

} // namespace

std::string_view to_string(FeatureSet set) noexcept {
    switch (set) {
    case FeatureSet::stylo: return "stylo";
    case FeatureSet::embed: return "embed";
    case FeatureSet::both: break;
    }
    return "both";
}

FeatureSet parse_feature_set(std::string_view text) {
    if (text == "stylo") {
        return FeatureSet::stylo;
    }
    if (text == "embed") {
        return FeatureSet::embed;
    }
    if (text == "both") {
        return FeatureSet::both;
    }
    throw ValidationError("unknown feature set '" + std::string(text) + "'");
}

std::string serialize_model(const Classifier& model, const std::optional<ModelMetadata>& metadata) {
    binio::ByteWriter w;
    w.put_bytes(kMagic);
    w.put_u32(kVersion);
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        w.put_u32(kKindLinear);
        write_linear(w, *linear);
    } else {
        w.put_u32(kKindEnsemble);
        write_ensemble(w, std::get<TreeEnsemble>(model));
    }
    write_metadata(w, metadata);
    w.put_u32(binio::crc32(w.data()));
    return std::move(w).take();
}

StoredModel deserialize_model(std::string_view bytes) {
    if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
        throw FormatError("not a model file (bad magic)");
    }
    binio::ByteReader header{bytes.substr(kMagic.size())};
    const auto version = header.get_u32();
    if (version != kVersion) {
        throw FormatError("unsupported model version " + std::to_string(version));
    }
    if (bytes.size() < kMagic.size() + 12) {
        throw FormatError("truncated model file");
    }
    const auto body = bytes.substr(0, bytes.size() - 4);
    binio::ByteReader tail{bytes.substr(bytes.size() - 4)};
    if (tail.get_u32() != binio::crc32(body)) {
        throw FormatError("model checksum mismatch (corrupt or truncated file)");
    }
    binio::ByteReader r{body.substr(kMagic.size() + 4)};
    const auto kind = r.get_u32();
    StoredModel out;
    if (kind == kKindLinear) {
        out.classifier = read_linear(r);
    } else if (kind == kKindEnsemble) {
        out.classifier = read_ensemble(r);
    } else {
        throw FormatError("unknown model kind " + std::to_string(kind));
    }
    out.metadata = read_metadata(r);
    if (r.remaining() != 0) {
        throw FormatError("trailing bytes in model file");
    }
    return out;
}

void save_model(const std::string& path, const Classifier& model,
                const std::optional<ModelMetadata>& metadata) {
    binio::write_file(path, serialize_model(model, metadata));
}

StoredModel load_model(const std::string& path) { return deserialize_model(binio::read_file(path)); }

} // namespace mgt
