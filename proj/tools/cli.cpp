#include "mgt/cli.hpp"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"
#include "mgt/eval.hpp"
#include "mgt/log.hpp"
#include "mgt/parallel.hpp"
#include "mgt/pipeline.hpp"
#include "mgt/stylometry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mgt::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct CommonFlags {
    std::string task{"detection"};
    std::string lang{"en,es"};
    std::string preprocess{"unicode"};
    std::uint64_t seed{0};
    std::string out;
};

struct ModelFlags {
    std::string features{"both"};
    std::string model{"logreg"};
    std::string embeddings;
    EmbeddingConfig embedding;
    int embedding_workers{1};
    LinearConfig linear;
    GbdtConfig gbdt;
};

/// Collects input digests and staged outputs; nothing touches the output directory
/// until commit().
class Run {
public:
    Run(const CLI::App* sub, const std::string& out_dir, int threads, Clock::time_point start)
        : sub_{sub}, out_dir_{out_dir}, threads_{threads}, start_{start} {}

    void add_input(const std::string& path) {
        if (!path.empty() && !inputs_.contains(path)) {
            inputs_[path] = file_digest(path);
        }
    }

    void add_input(const std::string& path, std::string digest) { inputs_[path] = std::move(digest); }

    void set_seeds(json seeds) { seeds_ = std::move(seeds); }

    void stage(std::string name, std::function<void(const std::string&)> writer) {
        staged_.emplace_back(std::move(name), std::move(writer));
    }

    void stage_text(std::string name, std::string text) {
        stage(std::move(name), [text = std::move(text)](const std::string& path) { binio::write_file(path, text); });
    }

    /// Records a file written as a side effect of a staged writer.
    void note_artifact(const std::string& path) { artifacts_.push_back(path); }

    std::string path_of(const std::string& name) const { return (out_dir_ / name).string(); }

    void commit(std::ostream& out) {
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory " + out_dir_.string() + ": " + ec.message());
        }
        for (const auto& [name, writer] : staged_) {
            const auto path = path_of(name);
            writer(path);
            artifacts_.push_back(path);
        }
        json manifest;
        manifest["command"] = sub_->get_name();
        manifest["config"] = option_values();
        manifest["threads"] = threads_;
        manifest["inputs"] = inputs_;
        manifest["seeds"] = seeds_;
        manifest["artifacts"] = artifacts_;
        manifest["duration_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
        const auto manifest_path = out_dir_ / "manifests.jsonl";
        std::ofstream file(manifest_path, std::ios::app | std::ios::binary);
        file << manifest.dump() << '\n';
        if (!file) {
            throw IoError("cannot append to " + manifest_path.string());
        }
        for (const auto& a : artifacts_) {
            out << "wrote " << a << '\n';
        }
    }

private:
    json option_values() const {
        json cfg = json::object();
        for (const CLI::Option* opt : sub_->get_options()) {
            if (opt->get_lnames().empty() || opt->get_lnames().front().starts_with("help")) {
                continue;
            }
            const auto& key = opt->get_lnames().front();
            if (opt->count() == 0) {
                cfg[key] = opt->get_default_str();
            } else if (opt->results().size() == 1) {
                cfg[key] = opt->results().front();
            } else {
                cfg[key] = opt->results();
            }
        }
        return cfg;
    }

    const CLI::App* sub_;
    fs::path out_dir_;
    int threads_;
    Clock::time_point start_;
    json inputs_ = json::object();
    json seeds_ = json::object();
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>> staged_;
    std::vector<std::string> artifacts_;
};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<Language> parse_languages(const std::string& text) {
    std::vector<Language> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto lang = parse_language(item);
        if (std::find(out.begin(), out.end(), lang) == out.end()) {
            out.push_back(lang);
        }
    }
    if (out.empty()) {
        throw ValidationError("--lang needs at least one language");
    }
    return out;
}

/// Reads and concatenates the given files, then keeps the requested languages.
Corpus load_corpus(Run& run, const std::vector<std::string>& paths, Task task, std::span<const Language> langs,
                   bool allow_unlabeled = false) {
    Corpus all;
    all.task = task;
    std::unordered_set<std::string> ids;
    for (const auto& path : paths) {
        run.add_input(path);
        auto part = read_corpus(path, task, allow_unlabeled);
        for (auto& doc : part.documents) {
            if (!ids.insert(doc.id).second) {
                throw ValidationError("duplicate document id " + doc.id + " (in " + path + ")");
            }
            all.documents.push_back(std::move(doc));
        }
    }
    Corpus kept = filter_languages(all, langs);
    if (kept.empty()) {
        throw ValidationError("no documents in the requested languages");
    }
    for (auto lang : langs) {
        if (std::none_of(kept.documents.begin(), kept.documents.end(),
                         [&](const Document& d) { return d.language == lang; })) {
            log_warning("no " + std::string(to_string(lang)) + " documents in the input");
        }
    }
    return kept;
}

PipelineConfig pipeline_config(const CommonFlags& c, const ModelFlags& m, int threads) {
    PipelineConfig cfg;
    cfg.task = parse_task(c.task);
    cfg.features = parse_feature_set(m.features);
    cfg.preprocess = parse_preprocess_mode(c.preprocess);
    cfg.model = parse_model_kind(m.model);
    cfg.embedding = m.embedding;
    cfg.embedding.preprocess = cfg.preprocess;
    cfg.train.linear = m.linear;
    cfg.train.gbdt = m.gbdt;
    cfg.threads = threads;
    cfg.embedding_workers = std::max(1, m.embedding_workers);
    cfg.set_seed(c.seed);
    cfg.embedding.validate();
    cfg.train.linear.validate();
    cfg.train.gbdt.validate();
    return cfg;
}

json seed_record(std::uint64_t seed, const PipelineConfig& cfg) {
    return json{{"seed", seed},
                {"embedding", cfg.embedding.rng_seed},
                {"linear", cfg.train.linear.rng_seed},
                {"gbdt", cfg.train.gbdt.rng_seed}};
}

std::shared_ptr<const EmbeddingModel> pretrained(Run& run, const std::string& path) {
    if (path.empty()) {
        return nullptr;
    }
    // one read serves both the manifest digest and the model
    const auto bytes = binio::read_file(path);
    run.add_input(path, sha256_hex(bytes));
    return std::make_shared<const EmbeddingModel>(EmbeddingModel::deserialize(bytes));
}

std::string corpus_tsv(const Corpus& corpus) {
    std::ostringstream s;
    write_tsv(s, corpus);
    return s.str();
}

std::string predictions_tsv(const Corpus& corpus, const std::vector<Prediction>& preds,
                            const std::vector<std::string>& classes) {
    std::ostringstream s;
    s << "id\tlanguage\tgold\tpredicted";
    for (const auto& c : classes) {
        s << "\tp_" << c;
    }
    s << '\n';
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& doc = corpus.documents[i];
        s << doc.id << '\t' << to_string(doc.language) << '\t' << doc.label.name() << '\t'
          << classes[preds[i].label];
        for (double p : preds[i].probabilities) {
            s << '\t' << fixed6(p);
        }
        s << '\n';
    }
    return s.str();
}

/// Joint report first, then one per language present.
std::vector<EvalReport> evaluate_reports(const Corpus& corpus, const std::vector<Prediction>& preds,
                                         const std::vector<std::string>& classes) {
    std::vector<std::uint32_t> gold;
    std::vector<std::uint32_t> pred;
    std::array<std::vector<std::uint32_t>, 2> gold_l;
    std::array<std::vector<std::uint32_t>, 2> pred_l;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& doc = corpus.documents[i];
        const auto l = static_cast<std::size_t>(doc.language);
        gold.push_back(doc.label.value);
        pred.push_back(static_cast<std::uint32_t>(preds[i].label));
        gold_l[l].push_back(doc.label.value);
        pred_l[l].push_back(static_cast<std::uint32_t>(preds[i].label));
    }
    std::vector<EvalReport> reports{make_report(confusion(gold, pred, classes))};
    for (std::size_t l = 0; l < 2; ++l) {
        if (!gold_l[l].empty()) {
            reports.push_back(make_report(confusion(gold_l[l], pred_l[l], classes), static_cast<Language>(l)));
        }
    }
    return reports;
}

std::string report_text(const EvalReport& r) {
    std::ostringstream s;
    write_report_text(s, r);
    return s.str();
}

std::string loss_tsv(std::string_view step, std::span<const double> losses) {
    std::ostringstream s;
    s << step << "\tloss\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        s << i + 1 << '\t' << fixed6(losses[i]) << '\n';
    }
    return s.str();
}

// Option registration

const std::vector<std::string> kTasks{"detection", "attribution"};
const std::vector<std::string> kModes{"unicode", "strict-ascii"};

void add_out(CLI::App* sub, CommonFlags& c) {
    sub->add_option("--out", c.out, "output directory")->required();
}

void add_task(CLI::App* sub, CommonFlags& c) {
    sub->add_option("--task", c.task, "detection or attribution")->check(CLI::IsMember(kTasks));
}

void add_lang(CLI::App* sub, CommonFlags& c) {
    sub->add_option("--lang", c.lang, "languages to keep: en, es or en,es");
}

void add_preprocess(CLI::App* sub, CommonFlags& c) {
    sub->add_option("--preprocess", c.preprocess, "unicode or strict-ascii")->check(CLI::IsMember(kModes));
}

void add_seed(CLI::App* sub, CommonFlags& c) { sub->add_option("--seed", c.seed, "seed for all randomness"); }

void add_embedding_flags(CLI::App* sub, ModelFlags& m) {
    auto& e = m.embedding;
    sub->add_option("--emb-dim", e.dim, "embedding dimension");
    sub->add_option("--emb-window", e.window, "maximum context window");
    sub->add_option("--emb-negatives", e.negatives, "negative samples per pair");
    sub->add_option("--emb-epochs", e.epochs, "training epochs");
    sub->add_option("--emb-min-count", e.min_count, "minimum word frequency");
    sub->add_option("--emb-minn", e.ngram_min, "shortest character n-gram");
    sub->add_option("--emb-maxn", e.ngram_max, "longest character n-gram");
    sub->add_option("--emb-buckets", e.bucket_count, "hashed n-gram buckets");
    sub->add_option("--emb-lr", e.initial_lr, "initial learning rate");
    sub->add_option("--emb-workers", m.embedding_workers, "training threads; 1 is bit-reproducible");
}

void add_classifier_flags(CLI::App* sub, ModelFlags& m) {
    sub->add_option("--features", m.features, "stylo, embed or both")
        ->check(CLI::IsMember({"stylo", "embed", "both"}));
    sub->add_option("--model", m.model, "logreg or gbdt")->check(CLI::IsMember({"logreg", "gbdt"}));
    sub->add_option("--embeddings", m.embeddings, "pretrained embedding file to reuse");
    sub->add_option("--epochs", m.linear.epochs, "logreg epochs");
    sub->add_option("--batch-size", m.linear.batch_size, "logreg mini-batch size");
    sub->add_option("--learning-rate", m.linear.learning_rate, "logreg learning rate");
    sub->add_option("--l2", m.linear.l2_lambda, "logreg L2 strength");
    sub->add_option("--rounds", m.gbdt.rounds, "boosting rounds");
    sub->add_option("--max-depth", m.gbdt.max_depth, "tree depth");
    sub->add_option("--eta", m.gbdt.eta, "boosting shrinkage");
    sub->add_option("--lambda", m.gbdt.lambda, "leaf L2 strength");
    sub->add_option("--gamma", m.gbdt.gamma, "minimum split gain");
    sub->add_option("--min-child-weight", m.gbdt.min_child_weight, "minimum hessian per child");
    add_embedding_flags(sub, m);
}

// Subcommands

void run_ingest(Run& run, const CommonFlags& c, const std::vector<std::string>& inputs,
                const std::vector<double>& split, std::ostream& out) {
    const auto task = parse_task(c.task);
    const auto corpus = load_corpus(run, inputs, task, parse_languages(c.lang));
    run.set_seeds(json{{"seed", c.seed}});
    if (split.empty()) {
        run.stage_text("corpus.tsv", corpus_tsv(corpus));
        out << "documents: " << corpus.size() << '\n';
        return;
    }
    if (split.size() != 3) {
        throw ValidationError("--split takes three fractions: train,valid,test");
    }
    const auto parts = split_corpus(corpus, SplitFractions{split[0], split[1], split[2]}, c.seed);
    run.stage_text("train.tsv", corpus_tsv(parts.train));
    run.stage_text("valid.tsv", corpus_tsv(parts.valid));
    run.stage_text("test.tsv", corpus_tsv(parts.test));
    out << "train: " << parts.train.size() << "\nvalid: " << parts.valid.size() << "\ntest: " << parts.test.size()
        << '\n';
}

void run_features(Run& run, const CommonFlags& c, const std::vector<std::string>& inputs, int threads) {
    const auto corpus = load_corpus(run, inputs, parse_task(c.task), parse_languages(c.lang));
    const auto rows = feature_rows(corpus.documents, parse_preprocess_mode(c.preprocess), threads);
    std::ostringstream s;
    write_features_tsv(s, corpus.documents, rows);
    run.stage_text("features.tsv", s.str());
}

void run_train_embeddings(Run& run, const CommonFlags& c, ModelFlags& m, const std::vector<std::string>& inputs,
                          int threads, std::ostream& out) {
    const auto corpus = load_corpus(run, inputs, parse_task(c.task), parse_languages(c.lang));
    const auto cfg = pipeline_config(c, m, threads);
    run.set_seeds(seed_record(c.seed, cfg));
    EmbeddingTrainLog log;
    auto model = std::make_shared<EmbeddingModel>(train_embeddings(corpus, cfg.embedding, cfg.embedding_workers, &log));
    out << "vocabulary: " << model->vocab().size() << " words\n";
    run.stage("embeddings.bin", [model](const std::string& path) { model->save(path); });
    run.stage_text("embedding_loss.tsv", loss_tsv("epoch", log.epoch_loss));
}

void run_train(Run& run, const CommonFlags& c, ModelFlags& m, const std::vector<std::string>& inputs, int threads,
               std::ostream& out) {
    const auto cfg = pipeline_config(c, m, threads);
    const auto corpus = load_corpus(run, inputs, cfg.task, parse_languages(c.lang));
    const auto emb = pretrained(run, m.embeddings);
    run.set_seeds(seed_record(c.seed, cfg));
    auto pipeline = std::make_shared<TrainedPipeline>(TrainedPipeline::train(corpus, cfg, emb));
    const bool writes_embeddings = pipeline->embeddings() && m.embeddings.empty();
    const std::string emb_path = !pipeline->embeddings() ? std::string{}
                                 : writes_embeddings    ? run.path_of("embeddings.bin")
                                                        : m.embeddings;
    run.stage("model.bin", [&run, pipeline, emb_path, writes_embeddings](const std::string& path) {
        pipeline->save(path, emb_path);
        if (writes_embeddings) {
            run.note_artifact(emb_path);
        }
    });
    const auto& clf = pipeline->classifier();
    if (const auto* lin = std::get_if<LinearModel>(&clf)) {
        run.stage_text("training_loss.tsv", loss_tsv("epoch", lin->epoch_loss()));
    } else {
        run.stage_text("training_loss.tsv", loss_tsv("round", std::get<TreeEnsemble>(clf).train_loss()));
    }
    out << "trained " << m.model << " on " << corpus.size() << " documents (" << m.features << " features, "
        << input_dim(clf) << " inputs)\n";
}

void run_evaluate(Run& run, const CommonFlags& c, const std::string& task_flag, const std::string& model_path,
                  const std::vector<std::string>& tests, const std::string& emb_override, int threads,
                  std::ostream& out) {
    run.add_input(model_path);
    run.add_input(emb_override);
    const auto pipeline = TrainedPipeline::load(model_path, emb_override);
    const auto task = pipeline.metadata().task;
    if (!task_flag.empty() && parse_task(task_flag) != task) {
        throw ValidationError("model was trained for " + std::string(to_string(task)) + ", not " + task_flag);
    }
    const auto corpus = load_corpus(run, tests, task, parse_languages(c.lang));
    const auto preds = pipeline.predict(corpus, threads);
    const auto& classes = class_list(pipeline.classifier());
    const auto reports = evaluate_reports(corpus, preds, classes);

    run.stage_text("report.txt", report_text(reports.front()));
    for (std::size_t i = 1; i < reports.size(); ++i) {
        run.stage_text("report." + std::string(to_string(*reports[i].language)) + ".txt", report_text(reports[i]));
    }
    std::ostringstream tsv;
    write_report_tsv(tsv, reports);
    run.stage_text("report.tsv", tsv.str());
    run.stage_text("predictions.tsv", predictions_tsv(corpus, preds, classes));
    for (const auto& r : reports) {
        out << (r.language ? to_string(*r.language) : std::string_view("joint")) << ": macro_f1 "
            << fixed6(r.macro_f1) << ", accuracy " << fixed6(r.accuracy) << " (n=" << r.n_test << ")\n";
    }
}

void run_fewshot(Run& run, const CommonFlags& c, ModelFlags& m, const std::vector<std::string>& inputs,
                 const std::vector<std::string>& tests, const std::vector<std::size_t>& sizes, int threads,
                 std::ostream& out) {
    const auto cfg = pipeline_config(c, m, threads);
    const std::vector<Language> both{Language::en, Language::es};
    const auto pool = load_corpus(run, inputs, cfg.task, both);
    const auto test = load_corpus(run, tests, cfg.task, both);
    const auto emb = pretrained(run, m.embeddings);
    run.set_seeds(seed_record(c.seed, cfg));
    const std::vector<Language> en{Language::en};
    const std::vector<Language> es{Language::es};
    const FewShotRunner runner = [&](const Corpus& train, const Corpus& eval, std::uint64_t) {
        return TrainedPipeline::train(train, cfg, emb).predict(eval, threads);
    };
    const auto report = fewshot_curve(filter_languages(pool, en), filter_languages(pool, es), sizes, runner,
                                      filter_languages(test, en), filter_languages(test, es), c.seed);
    std::ostringstream tsv;
    write_fewshot_tsv(tsv, report);
    run.stage_text("fewshot.tsv", tsv.str());
    out << tsv.str();
}

void run_attribute(Run& run, const CommonFlags& c, const std::string& model_path,
                   const std::vector<std::string>& inputs, const std::string& emb_override, int threads,
                   std::ostream& out) {
    run.add_input(model_path);
    run.add_input(emb_override);
    const auto pipeline = TrainedPipeline::load(model_path, emb_override);
    const auto corpus = load_corpus(run, inputs, pipeline.metadata().task, parse_languages(c.lang), true);
    const auto preds = pipeline.predict(corpus, threads);
    const auto& classes = class_list(pipeline.classifier());
    run.stage_text("predictions.tsv", predictions_tsv(corpus, preds, classes));
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& p : preds) {
        ++counts[p.label];
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        out << classes[k] << ": " << counts[k] << '\n';
    }
}

void run_report(Run& run, const CommonFlags& c, const std::vector<std::string>& models,
                std::vector<std::string> names, const std::vector<std::string>& tests, int threads,
                std::ostream& out) {
    if (!names.empty() && names.size() != models.size()) {
        throw ValidationError("--name must be given once per --model");
    }
    std::vector<TrainedPipeline> pipelines;
    for (const auto& path : models) {
        run.add_input(path);
        pipelines.push_back(TrainedPipeline::load(path));
    }
    const auto task = pipelines.front().metadata().task;
    for (std::size_t i = 0; i < pipelines.size(); ++i) {
        if (pipelines[i].metadata().task != task) {
            throw ValidationError("all models in a report must share one task");
        }
        if (names.size() < models.size()) {
            const auto kind = std::holds_alternative<LinearModel>(pipelines[i].classifier()) ? "logreg" : "gbdt";
            names.push_back(std::string(kind) + "-" + std::string(to_string(pipelines[i].metadata().features)));
        }
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (names[i] == names[j]) {
                names[i] += "-" + std::to_string(i + 1);
            }
        }
    }
    const auto corpus = load_corpus(run, tests, task, parse_languages(c.lang));
    std::vector<std::pair<std::string, EvalReport>> joint;
    for (std::size_t i = 0; i < pipelines.size(); ++i) {
        const auto preds = pipelines[i].predict(corpus, threads);
        const auto reports = evaluate_reports(corpus, preds, class_list(pipelines[i].classifier()));
        joint.emplace_back(names[i], reports.front());
        run.stage_text("report." + names[i] + ".txt", report_text(reports.front()));
        out << names[i] << ": macro_f1 " << fixed6(reports.front().macro_f1) << '\n';
    }
    std::ostringstream csv;
    write_error_csv(csv, joint);
    run.stage_text("per_class_error.csv", csv.str());
    std::ostringstream svg;
    write_error_svg(svg, joint);
    run.stage_text("per_class_error.svg", svg.str());
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const auto start = Clock::now();
    CLI::App app{"Machine-generated text detection and model attribution", "mgt"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    CommonFlags c;
    ModelFlags m;
    std::vector<std::string> inputs;
    std::vector<std::string> tests;
    std::vector<double> split;
    std::vector<std::size_t> sizes = kDefaultFewShotSizes;
    std::vector<std::string> model_paths;
    std::vector<std::string> names;
    std::string model_path;
    std::string task_flag;
    std::string emb_override;

    auto* ingest = app.add_subcommand("ingest", "validate corpus files and optionally split them");
    ingest->add_option("--input", inputs, "corpus TSV (optionally .gz); repeatable")->required();
    ingest->add_option("--split", split, "train,valid,test fractions")->delimiter(',');
    add_task(ingest, c);
    add_lang(ingest, c);
    add_seed(ingest, c);
    add_out(ingest, c);

    auto* features = app.add_subcommand("features", "compute stylometric features");
    features->add_option("--input", inputs, "corpus TSV; repeatable")->required();
    add_task(features, c);
    add_lang(features, c);
    add_preprocess(features, c);
    add_out(features, c);

    auto* embed = app.add_subcommand("train-embeddings", "train subword skip-gram embeddings");
    embed->add_option("--input", inputs, "corpus TSV; repeatable")->required();
    add_task(embed, c);
    add_lang(embed, c);
    add_preprocess(embed, c);
    add_seed(embed, c);
    add_embedding_flags(embed, m);
    add_out(embed, c);

    auto* train = app.add_subcommand("train", "train a classifier");
    train->add_option("--input", inputs, "training corpus TSV; repeatable")->required();
    add_task(train, c);
    add_lang(train, c);
    add_preprocess(train, c);
    add_seed(train, c);
    add_classifier_flags(train, m);
    add_out(train, c);

    auto* evaluate = app.add_subcommand("evaluate", "score a trained model on a labelled corpus");
    evaluate->add_option("--model", model_path, "model file")->required();
    evaluate->add_option("--test", tests, "test corpus TSV; repeatable")->required();
    evaluate->add_option("--task", task_flag, "expected task (checked against the model)")
        ->check(CLI::IsMember(kTasks));
    evaluate->add_option("--embeddings", emb_override, "embedding file replacing the stored path");
    add_lang(evaluate, c);
    add_out(evaluate, c);

    auto* fewshot = app.add_subcommand("fewshot", "learning curve over bilingual sample sizes");
    fewshot->add_option("--input", inputs, "training pool TSV; repeatable")->required();
    fewshot->add_option("--test", tests, "evaluation corpus TSV; repeatable")->required();
    fewshot->add_option("--sizes", sizes, "total sample sizes, split evenly across en and es")->delimiter(',');
    add_task(fewshot, c);
    add_preprocess(fewshot, c);
    add_seed(fewshot, c);
    add_classifier_flags(fewshot, m);
    add_out(fewshot, c);

    auto* attribute = app.add_subcommand("attribute", "label documents with a trained model");
    attribute->add_option("--model", model_path, "model file")->required();
    attribute->add_option("--input", inputs, "corpus TSV; label column may be '?'")->required();
    attribute->add_option("--embeddings", emb_override, "embedding file replacing the stored path");
    add_lang(attribute, c);
    add_out(attribute, c);

    auto* report = app.add_subcommand("report", "per-class error comparison of several models");
    report->add_option("--model", model_paths, "model file; repeatable")->required();
    report->add_option("--name", names, "display name per model; repeatable");
    report->add_option("--test", tests, "test corpus TSV; repeatable")->required();
    add_lang(report, c);
    add_out(report, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    const int threads = default_threads();
    CLI::App* sub = app.get_subcommands().front();
    try {
        Run run{sub, c.out, threads, start};
        if (sub == ingest) {
            run_ingest(run, c, inputs, split, out);
        } else if (sub == features) {
            run_features(run, c, inputs, threads);
        } else if (sub == embed) {
            run_train_embeddings(run, c, m, inputs, threads, out);
        } else if (sub == train) {
            run_train(run, c, m, inputs, threads, out);
        } else if (sub == evaluate) {
            run_evaluate(run, c, task_flag, model_path, tests, emb_override, threads, out);
        } else if (sub == fewshot) {
            run_fewshot(run, c, m, inputs, tests, sizes, threads, out);
        } else if (sub == attribute) {
            run_attribute(run, c, model_path, inputs, emb_override, threads, out);
        } else {
            run_report(run, c, model_paths, names, tests, threads, out);
        }
        run.commit(out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace mgt::cli
