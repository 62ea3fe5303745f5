#include "doctest.h"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"
#include "mgt/eval.hpp"
#include "mgt/pipeline.hpp"
#include "mgt/synthetic.hpp"

#include <cstring>
#include <filesystem>
#include <set>

using namespace mgt;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_pipeline(FeatureSet features, ModelKind model) {
    PipelineConfig cfg;
    cfg.features = features;
    cfg.model = model;
    cfg.embedding.dim = 16;
    cfg.embedding.bucket_count = 20000;
    cfg.embedding.epochs = 2;
    cfg.train.linear.epochs = 30;
    cfg.train.gbdt.rounds = 20;
    cfg.train.gbdt.max_depth = 4;
    cfg.set_seed(11);
    return cfg;
}

SplitCorpus synthetic_split(Task task, std::size_t per_language, std::uint64_t seed) {
    SyntheticConfig sc;
    sc.task = task;
    sc.docs_per_language = per_language;
    sc.seed = seed;
    return split_corpus(synthetic_corpus(sc), SplitFractions{0.8, 0.1, 0.1}, seed);
}

double macro_on(const TrainedPipeline& p, const Corpus& test) {
    std::vector<std::uint32_t> pred;
    for (const auto& pr : p.predict(test, 2)) {
        pred.push_back(static_cast<std::uint32_t>(pr.label));
    }
    const auto names = class_names(test.task);
    return macro_f1(confusion(labels_of(test), pred, {names.begin(), names.end()}));
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("synthetic corpora are valid, balanced and reproducible") {
    SyntheticConfig sc;
    sc.docs_per_language = 120;
    sc.seed = 4;
    const auto a = synthetic_corpus(sc);
    CHECK(a.size() == 240);
    CHECK_NOTHROW(validate(a));
    std::set<std::string> ids;
    std::size_t generated = 0;
    std::size_t spanish = 0;
    for (const auto& d : a.documents) {
        ids.insert(d.id);
        generated += d.label.value == 0;
        spanish += d.language == Language::es;
        CHECK_FALSE(preprocess(d.raw_text, PreprocessMode::unicode_letters).empty());
    }
    CHECK(ids.size() == 240);
    CHECK(generated == 120);
    CHECK(spanish == 120);
    const auto b = synthetic_corpus(sc);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.documents[i].raw_text == b.documents[i].raw_text);
    }
    sc.task = Task::attribution;
    sc.languages = {Language::en};
    const auto attr = synthetic_corpus(sc);
    CHECK(attr.size() == 120);
    std::set<int> labels;
    for (const auto& d : attr.documents) {
        labels.insert(d.label.value);
    }
    CHECK(labels.size() == 6);
}

TEST_CASE("feature dimensions follow the feature set") {
    const auto split = synthetic_split(Task::detection, 100, 1);
    for (auto [set, width] : {std::pair{FeatureSet::stylo, 4u}, std::pair{FeatureSet::embed, 16u},
                              std::pair{FeatureSet::both, 20u}}) {
        const auto p = TrainedPipeline::train(split.train, small_pipeline(set, ModelKind::logreg));
        CHECK(input_dim(p.classifier()) == width);
        CHECK(p.featurize(split.test, 1).cols() == width);
        CHECK(static_cast<bool>(p.embeddings()) == (set != FeatureSet::stylo));
    }
}

TEST_CASE("parallel featurisation matches the serial reference") {
    const auto split = synthetic_split(Task::detection, 200, 2);
    const auto p = TrainedPipeline::train(split.train, small_pipeline(FeatureSet::both, ModelKind::logreg));
    const auto par = p.featurize(split.train, 4);
    const auto ser = p.featurize_serial(split.train);
    REQUIRE(par.rows() == ser.rows());
    CHECK(std::memcmp(par.data().data(), ser.data().data(), par.data().size() * sizeof(double)) == 0);
}

TEST_CASE("both models learn the synthetic detection task") {
    const auto split = synthetic_split(Task::detection, 400, 3);
    for (auto model : {ModelKind::logreg, ModelKind::gbdt}) {
        const auto p = TrainedPipeline::train(split.train, small_pipeline(FeatureSet::both, model));
        CHECK(macro_on(p, split.test) >= 0.9);
    }
    const auto stylo = TrainedPipeline::train(split.train, small_pipeline(FeatureSet::stylo, ModelKind::gbdt));
    CHECK(macro_on(stylo, split.test) >= 0.9);
}

TEST_CASE("training is reproducible for a fixed seed") {
    const auto split = synthetic_split(Task::attribution, 150, 5);
    auto cfg = small_pipeline(FeatureSet::both, ModelKind::gbdt);
    cfg.task = Task::attribution;
    const auto a = TrainedPipeline::train(split.train, cfg);
    const auto b = TrainedPipeline::train(split.train, cfg);
    CHECK(serialize_model(a.classifier()) == serialize_model(b.classifier()));
    CHECK(*a.embeddings() == *b.embeddings());
}

TEST_CASE("saved pipelines reload with identical predictions") {
    const auto dir = scratch_dir("mgt_test_pipeline");
    const auto split = synthetic_split(Task::detection, 150, 6);
    const auto p = TrainedPipeline::train(split.train, small_pipeline(FeatureSet::both, ModelKind::logreg));
    const auto model_path = (dir / "models" / "m.bin").string();
    const auto emb_path = (dir / "emb.bin").string();
    fs::create_directories(dir / "models");
    p.save(model_path, emb_path);
    CHECK(load_model(model_path).metadata->embeddings_path == "../emb.bin");

    const auto q = TrainedPipeline::load(model_path);
    const auto before = p.predict(split.test, 1);
    const auto after = q.predict(split.test, 1);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].probabilities == after[i].probabilities);
    }

    // saving again leaves an identical embedding file untouched
    const auto stamp = fs::last_write_time(emb_path);
    p.save(model_path, emb_path);
    CHECK(fs::last_write_time(emb_path) == stamp);

    // moving both files together keeps the relative link valid
    fs::rename(dir / "models", dir / "moved");
    fs::create_directories(dir / "elsewhere");
    fs::rename(emb_path, dir / "elsewhere" / "emb.bin");
    CHECK_THROWS_AS(TrainedPipeline::load((dir / "moved" / "m.bin").string()), IoError);
    CHECK_NOTHROW(TrainedPipeline::load((dir / "moved" / "m.bin").string(), (dir / "elsewhere" / "emb.bin").string()));

    // a different embedding file is refused by digest
    auto other = small_pipeline(FeatureSet::both, ModelKind::logreg);
    other.set_seed(12);
    TrainedPipeline::train(split.train, other).embeddings()->save((dir / "other.bin").string());
    CHECK_THROWS_AS(TrainedPipeline::load((dir / "moved" / "m.bin").string(), (dir / "other.bin").string()),
                    ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("stylometric pipelines need no embedding file") {
    const auto dir = scratch_dir("mgt_test_pipeline_stylo");
    const auto split = synthetic_split(Task::detection, 100, 7);
    const auto p = TrainedPipeline::train(split.train, small_pipeline(FeatureSet::stylo, ModelKind::gbdt));
    const auto path = (dir / "m.bin").string();
    p.save(path, "");
    const auto q = TrainedPipeline::load(path);
    CHECK_FALSE(q.embeddings());
    CHECK(q.metadata().features == FeatureSet::stylo);
    fs::remove_all(dir);
}

TEST_CASE("pipeline input errors") {
    const auto split = synthetic_split(Task::detection, 100, 8);
    auto cfg = small_pipeline(FeatureSet::both, ModelKind::logreg);
    cfg.task = Task::attribution;
    CHECK_THROWS_AS(TrainedPipeline::train(split.train, cfg), ValidationError);

    cfg = small_pipeline(FeatureSet::both, ModelKind::logreg);
    const auto p = TrainedPipeline::train(split.train, cfg);
    CHECK_THROWS_AS(p.save("unused.bin", ""), ValidationError);

    auto strict = cfg;
    strict.preprocess = PreprocessMode::strict_ascii;
    CHECK_THROWS_AS(TrainedPipeline::train(split.train, strict, p.embeddings()), ValidationError);

    auto broken = split.test;
    broken.documents[3].raw_text = "™ — ™";
    broken.documents[3].id = "broken-doc";
    CHECK_THROWS_WITH_AS(p.predict(broken, 4), doctest::Contains("broken-doc"), UndefinedFeatureError);
    CHECK_THROWS_AS(parse_model_kind("svm"), ValidationError);
}

TEST_CASE("file digest is SHA-256") {
    const auto path = (fs::temp_directory_path() / "mgt_digest.txt").string();
    binio::write_file(path, "abc");
    CHECK(file_digest(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    fs::remove(path);
}
