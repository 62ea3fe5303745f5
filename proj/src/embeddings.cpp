#include "mgt/embeddings.hpp"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"
#include "mgt/log.hpp"
#include "mgt/rng.hpp"
#include "mgt/utf8.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mgt {
namespace {

constexpr std::string_view kMagic = "MGTE";
constexpr std::uint32_t kFormatVersion = 1;

float sigmoid(float x) {
    if (x > 30.0f) {
        return 1.0f;
    }
    if (x < -30.0f) {
        return 0.0f;
    }
    return 1.0f / (1.0f + std::exp(-x));
}

float log_clamped(float x) { return std::log(std::max(x, 1e-7f)); }

/// Cumulative unigram^0.75 weights over the vocabulary.
std::vector<double> negative_distribution(const Vocab& vocab) {
    std::vector<double> cdf(vocab.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        acc += std::pow(static_cast<double>(vocab[i].count), 0.75);
        cdf[i] = acc;
    }
    return cdf;
}

std::uint32_t draw_negative(const std::vector<double>& cdf, Rng& rng) {
    const double r = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                               static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

std::vector<std::vector<std::uint32_t>> vocab_lines(const Corpus& corpus, const Vocab& vocab,
                                                    PreprocessMode mode) {
    std::vector<std::vector<std::uint32_t>> lines;
    lines.reserve(corpus.size());
    for (const auto& doc : corpus.documents) {
        std::vector<std::uint32_t> ids;
        for (const auto& tok : document_tokens(doc, mode).tokens) {
            if (auto idx = vocab.index(tok)) {
                ids.push_back(*idx);
            }
        }
        lines.push_back(std::move(ids));
    }
    return lines;
}

} // namespace

void EmbeddingConfig::validate() const {
    if (dim == 0 || window == 0 || negatives == 0 || min_count == 0 || bucket_count == 0) {
        throw ValidationError("embedding dim, window, negatives, min_count and bucket_count must be positive");
    }
    if (ngram_min == 0 || ngram_min > ngram_max) {
        throw ValidationError("embedding n-gram range must satisfy 0 < ngram_min <= ngram_max");
    }
    if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
        throw ValidationError("embedding learning rate must be positive");
    }
}

Vocab::Vocab(std::vector<Entry> entries, std::uint64_t total_tokens)
    : entries_{std::move(entries)}, total_tokens_{total_tokens} {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        index_.emplace(entries_[i].word, static_cast<std::uint32_t>(i));
    }
}

std::optional<std::uint32_t> Vocab::index(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

TokenSequence document_tokens(const Document& doc, PreprocessMode mode) {
    if (!doc.clean_text.empty()) {
        return tokenize_words(doc.clean_text);
    }
    return tokenize_words(preprocess(doc.raw_text, mode));
}

Vocab build_vocab(const Corpus& corpus, const EmbeddingConfig& config) {
    if (corpus.empty()) {
        throw ValidationError("cannot build a vocabulary from an empty corpus");
    }
    std::unordered_map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& doc : corpus.documents) {
        for (auto& tok : document_tokens(doc, config.preprocess).tokens) {
            ++counts[std::move(tok)];
            ++total;
        }
    }
    std::vector<Vocab::Entry> entries;
    for (auto& [word, count] : counts) {
        if (count >= config.min_count) {
            entries.push_back({word, count});
        }
    }
    if (entries.empty()) {
        throw ValidationError("no word reaches min_count " + std::to_string(config.min_count));
    }
    std::sort(entries.begin(), entries.end(), [](const Vocab::Entry& a, const Vocab::Entry& b) {
        return a.count != b.count ? a.count > b.count : a.word < b.word;
    });
    return Vocab(std::move(entries), total);
}

std::uint32_t fnv1a32(std::string_view bytes) noexcept {
    std::uint32_t h = 2166136261u;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 16777619u;
    }
    return h;
}

std::vector<std::uint32_t> subword_ids(std::string_view word, const EmbeddingConfig& config,
                                       std::size_t vocab_size) {
    std::string wrapped;
    wrapped.reserve(word.size() + 2);
    wrapped.push_back('<');
    wrapped.append(word);
    wrapped.push_back('>');

    // Byte offsets of each code point boundary.
    std::vector<std::size_t> bounds;
    for (std::size_t pos = 0; pos < wrapped.size();) {
        bounds.push_back(pos);
        utf8::decode(wrapped, pos);
    }
    bounds.push_back(wrapped.size());
    const std::size_t cps = bounds.size() - 1;

    std::vector<std::uint32_t> ids;
    for (std::size_t start = 0; start < cps; ++start) {
        for (std::size_t n = config.ngram_min; n <= config.ngram_max && start + n <= cps; ++n) {
            const auto gram = std::string_view(wrapped).substr(bounds[start], bounds[start + n] - bounds[start]);
            ids.push_back(static_cast<std::uint32_t>(vocab_size + fnv1a32(gram) % config.bucket_count));
        }
    }
    return ids;
}

EmbeddingModel EmbeddingModel::initialize(EmbeddingConfig config, Vocab vocab) {
    config.validate();
    if (vocab.empty()) {
        throw ValidationError("cannot initialise embeddings with an empty vocabulary");
    }
    EmbeddingModel model;
    model.config_ = config;
    model.vocab_ = std::move(vocab);
    const std::size_t dim = config.dim;
    model.input_.resize(model.input_rows() * dim);
    model.output_.assign(model.output_rows() * dim, 0.0f);
    Rng rng{config.rng_seed};
    const double bound = 1.0 / static_cast<double>(dim);
    for (auto& v : model.input_) {
        v = static_cast<float>(rng.uniform(-bound, bound));
    }
    model.index_subwords();
    return model;
}

void EmbeddingModel::index_subwords() {
    word_rows_.clear();
    word_rows_offset_.assign(1, 0);
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        word_rows_.push_back(static_cast<std::uint32_t>(i));
        for (auto id : subword_ids(vocab_[i].word, config_, vocab_.size())) {
            word_rows_.push_back(id);
        }
        word_rows_offset_.push_back(word_rows_.size());
    }
}

std::span<const float> EmbeddingModel::input_row(std::size_t row) const {
    return std::span<const float>(input_).subspan(row * config_.dim, config_.dim);
}

std::span<float> EmbeddingModel::input_row(std::size_t row) {
    return std::span<float>(input_).subspan(row * config_.dim, config_.dim);
}

std::span<const float> EmbeddingModel::output_row(std::size_t row) const {
    return std::span<const float>(output_).subspan(row * config_.dim, config_.dim);
}

std::span<float> EmbeddingModel::output_row(std::size_t row) {
    return std::span<float>(output_).subspan(row * config_.dim, config_.dim);
}

std::span<const std::uint32_t> EmbeddingModel::word_rows(std::uint32_t word_index) const {
    const auto begin = word_rows_offset_[word_index];
    const auto end = word_rows_offset_[word_index + 1];
    return std::span<const std::uint32_t>(word_rows_).subspan(begin, end - begin);
}

std::vector<double> EmbeddingModel::word_vector(std::string_view word) const {
    std::vector<double> out(config_.dim, 0.0);
    std::vector<std::uint32_t> rows;
    if (auto idx = vocab_.index(word)) {
        const auto own = word_rows(*idx);
        rows.assign(own.begin(), own.end());
    } else {
        rows = subword_ids(word, config_, vocab_.size());
    }
    if (rows.empty()) {
        return out;
    }
    for (auto r : rows) {
        const auto row = input_row(r);
        for (std::size_t d = 0; d < out.size(); ++d) {
            out[d] += row[d];
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (auto& v : out) {
        v *= inv;
    }
    return out;
}

double EmbeddingModel::skipgram_loss(std::span<const SkipGramExample> batch) const {
    if (batch.empty()) {
        throw ValidationError("skip-gram loss of an empty batch");
    }
    const std::size_t dim = config_.dim;
    std::vector<float> hidden(dim);
    double total = 0.0;
    for (const auto& ex : batch) {
        std::fill(hidden.begin(), hidden.end(), 0.0f);
        const auto rows = word_rows(ex.center);
        for (auto r : rows) {
            const auto row = input_row(r);
            for (std::size_t d = 0; d < dim; ++d) {
                hidden[d] += row[d];
            }
        }
        for (auto& h : hidden) {
            h /= static_cast<float>(rows.size());
        }
        auto score = [&](std::uint32_t target) {
            const auto out = output_row(target);
            float dot = 0.0f;
            for (std::size_t d = 0; d < dim; ++d) {
                dot += out[d] * hidden[d];
            }
            return dot;
        };
        double loss = -std::log(std::max(1e-300, 1.0 / (1.0 + std::exp(-static_cast<double>(score(ex.context))))));
        for (auto neg : ex.negatives) {
            loss -= std::log(std::max(1e-300, 1.0 / (1.0 + std::exp(static_cast<double>(score(neg))))));
        }
        total += loss;
    }
    return total / static_cast<double>(batch.size());
}

bool EmbeddingModel::all_finite() const noexcept {
    const auto finite = [](float v) { return std::isfinite(v); };
    return std::all_of(input_.begin(), input_.end(), finite) &&
           std::all_of(output_.begin(), output_.end(), finite);
}

std::string EmbeddingModel::serialize() const {
    binio::ByteWriter w;
    w.put_bytes(kMagic);
    w.put_u32(kFormatVersion);
    w.put_u32(config_.dim);
    w.put_u32(config_.window);
    w.put_u32(config_.negatives);
    w.put_u32(config_.epochs);
    w.put_u32(config_.min_count);
    w.put_u32(config_.ngram_min);
    w.put_u32(config_.ngram_max);
    w.put_u32(config_.bucket_count);
    w.put_f64(config_.initial_lr);
    w.put_u64(config_.rng_seed);
    w.put_u8(static_cast<std::uint8_t>(config_.preprocess));
    w.put_u32(static_cast<std::uint32_t>(vocab_.size()));
    for (const auto& e : vocab_.entries()) {
        w.put_string(e.word);
        w.put_u64(e.count);
    }
    w.put_u64(vocab_.total_tokens());
    w.put_f32_array(input_);
    w.put_f32_array(output_);
    return std::move(w).take();
}

EmbeddingModel EmbeddingModel::deserialize(std::string_view bytes) {
    binio::ByteReader r{bytes};
    if (r.remaining() < kMagic.size() || r.get_bytes(kMagic.size()) != kMagic) {
        throw FormatError("not an embedding model (bad magic)");
    }
    const auto version = r.get_u32();
    if (version != kFormatVersion) {
        throw FormatError("unsupported embedding model version " + std::to_string(version));
    }
    EmbeddingConfig cfg;
    cfg.dim = r.get_u32();
    cfg.window = r.get_u32();
    cfg.negatives = r.get_u32();
    cfg.epochs = r.get_u32();
    cfg.min_count = r.get_u32();
    cfg.ngram_min = r.get_u32();
    cfg.ngram_max = r.get_u32();
    cfg.bucket_count = r.get_u32();
    cfg.initial_lr = r.get_f64();
    cfg.rng_seed = r.get_u64();
    const auto mode = r.get_u8();
    if (mode > 1) {
        throw FormatError("unknown preprocess mode in embedding model");
    }
    cfg.preprocess = static_cast<PreprocessMode>(mode);
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid embedding config: ") + e.what());
    }
    const auto vocab_size = r.get_u32();
    std::vector<Vocab::Entry> entries;
    entries.reserve(std::min<std::size_t>(vocab_size, r.remaining() / 12));
    for (std::uint32_t i = 0; i < vocab_size; ++i) {
        Vocab::Entry e;
        e.word = r.get_string();
        e.count = r.get_u64();
        entries.push_back(std::move(e));
    }
    const auto total = r.get_u64();

    EmbeddingModel model;
    model.config_ = cfg;
    model.vocab_ = Vocab(std::move(entries), total);
    const std::size_t n_in = model.input_rows() * cfg.dim;
    const std::size_t n_out = model.output_rows() * cfg.dim;
    if (r.remaining() != 4 * (n_in + n_out)) {
        throw FormatError("embedding matrices have the wrong size");
    }
    model.input_.resize(n_in);
    r.get_f32_array(model.input_);
    model.output_.resize(n_out);
    r.get_f32_array(model.output_);
    model.index_subwords();
    return model;
}

void EmbeddingModel::save(const std::string& path) const { binio::write_file(path, serialize()); }

EmbeddingModel EmbeddingModel::load(const std::string& path) {
    return deserialize(binio::read_file(path));
}

class SkipGramTrainer {
public:
    SkipGramTrainer(EmbeddingModel& model, const Corpus& corpus)
        : model_{model}, lines_{vocab_lines(corpus, model.vocab_, model.config_.preprocess)},
          cdf_{negative_distribution(model.vocab_)} {
        for (const auto& line : lines_) {
            line_tokens_ += line.size();
        }
    }

    void run(std::uint32_t epochs, int workers, EmbeddingTrainLog* log) {
        const auto& cfg = model_.config_;
        const double total_work = static_cast<double>(epochs) * static_cast<double>(line_tokens_);
        std::atomic<std::uint64_t> processed{0};
        for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
            double loss = 0.0;
            std::uint64_t pairs = 0;
            if (workers <= 1) {
                Worker w{*this, Rng{mix_seed(cfg.rng_seed, (std::uint64_t{epoch} + 1) << 16)}};
                for (const auto& line : lines_) {
                    w.train_line(line, processed, total_work);
                }
                loss = w.loss;
                pairs = w.pairs;
            } else {
                const auto n = static_cast<std::ptrdiff_t>(lines_.size());
#pragma omp parallel num_threads(workers) reduction(+ : loss, pairs)
                {
                    std::uint64_t tid = 0;
#ifdef _OPENMP
                    tid = static_cast<std::uint64_t>(omp_get_thread_num());
#endif
                    Worker w{*this, Rng{mix_seed(cfg.rng_seed, ((std::uint64_t{epoch} + 1) << 16) + tid)}};
#pragma omp for schedule(static)
                    for (std::ptrdiff_t i = 0; i < n; ++i) {
                        w.train_line(lines_[static_cast<std::size_t>(i)], processed, total_work);
                    }
                    loss += w.loss;
                    pairs += w.pairs;
                }
            }
            if (!model_.all_finite()) {
                throw NumericalError("embedding training produced a non-finite value in epoch " +
                                     std::to_string(epoch + 1));
            }
            if (log != nullptr) {
                log->epoch_loss.push_back(pairs > 0 ? loss / static_cast<double>(pairs) : 0.0);
            }
        }
    }

private:
    struct Worker {
        SkipGramTrainer& owner;
        Rng rng;
        std::vector<float> hidden;
        std::vector<float> grad;
        double loss{0.0};
        std::uint64_t pairs{0};

        Worker(SkipGramTrainer& o, Rng r)
            : owner{o}, rng{r}, hidden(o.model_.dim()), grad(o.model_.dim()) {}

        void train_line(const std::vector<std::uint32_t>& line, std::atomic<std::uint64_t>& processed,
                        double total_work) {
            const auto& cfg = owner.model_.config_;
            for (std::size_t w = 0; w < line.size(); ++w) {
                const auto done = processed.fetch_add(1, std::memory_order_relaxed);
                const float lr = static_cast<float>(
                    cfg.initial_lr * std::max(0.0, 1.0 - static_cast<double>(done) / total_work));
                const auto span = static_cast<std::size_t>(rng.below(cfg.window) + 1);
                const std::size_t lo = w >= span ? w - span : 0;
                const std::size_t hi = std::min(line.size() - 1, w + span);
                for (std::size_t c = lo; c <= hi; ++c) {
                    if (c != w) {
                        update(line[w], line[c], lr);
                    }
                }
            }
        }

        void update(std::uint32_t center, std::uint32_t target, float lr) {
            auto& model = owner.model_;
            const std::size_t dim = model.config_.dim;
            const auto rows = model.word_rows(center);
            std::fill(hidden.begin(), hidden.end(), 0.0f);
            for (auto r : rows) {
                const auto row = model.input_row(r);
                for (std::size_t d = 0; d < dim; ++d) {
                    hidden[d] += row[d];
                }
            }
            const float inv = 1.0f / static_cast<float>(rows.size());
            for (auto& h : hidden) {
                h *= inv;
            }
            std::fill(grad.begin(), grad.end(), 0.0f);
            loss += binary_step(target, true, lr);
            const auto vocab_size = owner.cdf_.size();
            for (std::uint32_t k = 0; k < model.config_.negatives && vocab_size > 1; ++k) {
                std::uint32_t neg = draw_negative(owner.cdf_, rng);
                while (neg == target) {
                    neg = draw_negative(owner.cdf_, rng);
                }
                loss += binary_step(neg, false, lr);
            }
            for (auto r : rows) {
                auto row = model.input_row(r);
                for (std::size_t d = 0; d < dim; ++d) {
                    row[d] += grad[d];
                }
            }
            ++pairs;
        }

        double binary_step(std::uint32_t target, bool positive, float lr) {
            auto out = owner.model_.output_row(target);
            const std::size_t dim = out.size();
            float dot = 0.0f;
            for (std::size_t d = 0; d < dim; ++d) {
                dot += out[d] * hidden[d];
            }
            const float score = sigmoid(dot);
            const float alpha = lr * ((positive ? 1.0f : 0.0f) - score);
            for (std::size_t d = 0; d < dim; ++d) {
                grad[d] += alpha * out[d];
            }
            for (std::size_t d = 0; d < dim; ++d) {
                out[d] += alpha * hidden[d];
            }
            return positive ? -log_clamped(score) : -log_clamped(1.0f - score);
        }
    };

    EmbeddingModel& model_;
    std::vector<std::vector<std::uint32_t>> lines_;
    std::vector<double> cdf_;
    std::uint64_t line_tokens_{0};
};

void train_epochs(EmbeddingModel& model, const Corpus& corpus, std::uint32_t epochs, int workers,
                  EmbeddingTrainLog* log) {
    if (corpus.empty()) {
        throw ValidationError("cannot train embeddings on an empty corpus");
    }
    if (epochs == 0) {
        return;
    }
    SkipGramTrainer trainer{model, corpus};
    trainer.run(epochs, workers, log);
}

EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config, int workers,
                                EmbeddingTrainLog* log) {
    config.validate();
    auto model = EmbeddingModel::initialize(config, build_vocab(corpus, config));
    train_epochs(model, corpus, config.epochs, workers, log);
    return model;
}

std::vector<SkipGramExample> sample_skipgram_batch(const EmbeddingModel& model, const Corpus& corpus,
                                                   std::size_t count, std::uint64_t seed) {
    const auto lines = vocab_lines(corpus, model.vocab(), model.config().preprocess);
    const auto cdf = negative_distribution(model.vocab());
    std::vector<std::pair<std::size_t, std::size_t>> positions;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (lines[l].size() >= 2) {
            for (std::size_t i = 0; i < lines[l].size(); ++i) {
                positions.emplace_back(l, i);
            }
        }
    }
    if (positions.empty()) {
        throw InsufficientDataError("corpus has no skip-gram pairs");
    }
    Rng rng{seed};
    std::vector<SkipGramExample> batch;
    batch.reserve(count);
    const std::size_t window = model.config().window;
    for (std::size_t k = 0; k < count; ++k) {
        const auto [l, i] = positions[static_cast<std::size_t>(rng.below(positions.size()))];
        const auto& line = lines[l];
        std::size_t j = i;
        while (j == i) {
            const std::size_t lo = i >= window ? i - window : 0;
            const std::size_t hi = std::min(line.size() - 1, i + window);
            j = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
        }
        SkipGramExample ex{line[i], line[j], {}};
        for (std::uint32_t n = 0; n < model.config().negatives && cdf.size() > 1; ++n) {
            std::uint32_t neg = draw_negative(cdf, rng);
            while (neg == ex.context) {
                neg = draw_negative(cdf, rng);
            }
            ex.negatives.push_back(neg);
        }
        batch.push_back(std::move(ex));
    }
    return batch;
}

FeatureScaler FeatureScaler::fit(std::span<const StyloFeatures> rows) {
    if (rows.empty()) {
        throw InsufficientDataError("cannot fit a feature scaler on zero rows");
    }
    FeatureScaler s;
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < 4; ++j) {
        double sum = 0.0;
        for (const auto& r : rows) {
            sum += r.values()[j];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : rows) {
            const double d = r.values()[j] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        s.mean[j] = mean;
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            s.stddev[j] = 1.0;
            s.constant[j] = true;
            log_warning("stylometric column " + std::string(kStyloNames[j]) +
                        " is constant on the training split; it is dropped (set to 0)");
        } else {
            s.stddev[j] = sd;
        }
    }
    return s;
}

std::array<double, 4> FeatureScaler::transform(const StyloFeatures& f) const noexcept {
    const auto v = f.values();
    std::array<double, 4> out{};
    for (std::size_t j = 0; j < 4; ++j) {
        out[j] = constant[j] ? 0.0 : (v[j] - mean[j]) / stddev[j];
    }
    return out;
}

DocVector doc_vector(const EmbeddingModel& model, const TokenSequence& tokens,
                     const StyloFeatures& stylo, const FeatureScaler& scaler) {
    if (tokens.empty()) {
        throw UndefinedFeatureError("document vector is undefined for a text without words");
    }
    const std::size_t dim = model.dim();
    DocVector out;
    out.values.assign(dim + 4, 0.0);
    for (const auto& tok : tokens.tokens) {
        const auto wv = model.word_vector(tok);
        for (std::size_t d = 0; d < dim; ++d) {
            out.values[d] += wv[d];
        }
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (std::size_t d = 0; d < dim; ++d) {
        out.values[d] *= inv;
    }
    const auto z = scaler.transform(stylo);
    std::copy(z.begin(), z.end(), out.values.begin() + static_cast<std::ptrdiff_t>(dim));
    for (double v : out.values) {
        if (!std::isfinite(v)) {
            throw NumericalError("document vector has a non-finite entry");
        }
    }
    return out;
}

} // namespace mgt
