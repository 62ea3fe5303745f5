#include "doctest.h"

#include "mgt/binio.hpp"
#include "mgt/errors.hpp"
#include "mgt/model_io.hpp"

#include <cstring>
#include <filesystem>
#include <random>

using namespace mgt;

namespace {

struct Data {
    FeatureMatrix x;
    std::vector<std::uint32_t> y;
};

Data noisy(std::size_t n, std::size_t d, std::uint32_t k, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Data out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        for (auto& v : row) {
            v = g(gen);
        }
        const auto label = static_cast<std::uint32_t>(i % k);
        row[label % d] += 2.0;
        out.x.push_row(row);
        out.y.push_back(label);
    }
    return out;
}

void put_u32(std::string& bytes, std::size_t at, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
        bytes[at + static_cast<std::size_t>(b)] = static_cast<char>((v >> (8 * b)) & 0xff);
    }
}

/// Rewrites the trailing checksum so structural checks are reached.
void reseal(std::string& bytes) {
    put_u32(bytes, bytes.size() - 4, binio::crc32(std::string_view(bytes).substr(0, bytes.size() - 4)));
}

void check_same_predictions(const Classifier& a, const Classifier& b, const FeatureMatrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto pa = predict(a, x.row(i));
        const auto pb = predict(b, x.row(i));
        REQUIRE(pa.probabilities.size() == pb.probabilities.size());
        for (std::size_t c = 0; c < pa.probabilities.size(); ++c) {
            CHECK(std::memcmp(&pa.probabilities[c], &pb.probabilities[c], sizeof(double)) == 0);
        }
    }
}

ModelMetadata sample_metadata() {
    ModelMetadata m;
    m.task = Task::attribution;
    m.features = FeatureSet::both;
    m.preprocess = PreprocessMode::strict_ascii;
    m.scaler.mean = {4.5, 80.0, 0.6, 0.2};
    m.scaler.stddev = {0.5, 20.0, 0.1, 1.0};
    m.scaler.constant = {false, false, false, true};
    m.embeddings_path = "embeddings.bin";
    m.embeddings_digest = std::string(64, 'a');
    return m;
}

} // namespace

TEST_CASE("crc32 matches the standard check value") {
    CHECK(binio::crc32("123456789") == 0xCBF43926u);
    CHECK(binio::crc32("") == 0u);
}

TEST_CASE("byte reader and writer round trip") {
    binio::ByteWriter w;
    w.put_u8(7);
    w.put_u32(0xdeadbeef);
    w.put_u64(1ull << 40);
    w.put_f32(1.5f);
    w.put_f64(-0.1);
    w.put_string("más");
    const auto bytes = std::move(w).take();
    CHECK(static_cast<unsigned char>(bytes[1]) == 0xef);  // little endian
    binio::ByteReader r{bytes};
    CHECK(r.get_u8() == 7);
    CHECK(r.get_u32() == 0xdeadbeef);
    CHECK(r.get_u64() == (1ull << 40));
    CHECK(r.get_f32() == 1.5f);
    CHECK(r.get_f64() == -0.1);
    CHECK(r.get_string() == "más");
    CHECK(r.remaining() == 0);
    CHECK_THROWS_AS(r.get_u8(), FormatError);
}

TEST_CASE("bulk float arrays encode like single floats") {
    const std::vector<float> values{0.0f, -1.25f, 3.0e-39f, 1.0e30f, -0.0f};
    binio::ByteWriter one;
    for (float v : values) {
        one.put_f32(v);
    }
    binio::ByteWriter bulk;
    bulk.put_f32_array(values);
    CHECK(one.data() == bulk.data());

    std::vector<float> back(values.size());
    binio::ByteReader r{bulk.data()};
    r.get_f32_array(back);
    CHECK(std::memcmp(back.data(), values.data(), values.size() * sizeof(float)) == 0);
    std::vector<float> too_many(values.size() + 1);
    binio::ByteReader short_reader{bulk.data()};
    CHECK_THROWS_AS(short_reader.get_f32_array(too_many), FormatError);
}

TEST_CASE("both model kinds round-trip with bit-exact predictions") {
    const auto data = noisy(200, 6, 3, 1);
    GbdtConfig gc;
    gc.rounds = 12;
    gc.max_depth = 4;
    gc.base_score = 0.125;
    LinearConfig lc;
    lc.epochs = 20;
    const std::vector<std::string> classes{"A", "B", "C"};
    const std::vector<Classifier> models{train_linear(data.x, data.y, classes, lc),
                                         train_gbdt(data.x, data.y, classes, gc)};
    const auto probe = noisy(100, 6, 3, 2);
    for (const auto& model : models) {
        const auto back = deserialize_model(serialize_model(model));
        CHECK(back.classifier.index() == model.index());
        CHECK_FALSE(back.metadata.has_value());
        CHECK(class_list(back.classifier) == classes);
        CHECK(input_dim(back.classifier) == 6);
        check_same_predictions(model, back.classifier, probe.x);
    }
    const auto ens = std::get<TreeEnsemble>(deserialize_model(serialize_model(models[1])).classifier);
    CHECK(ens.config().base_score == 0.125);
    CHECK(ens.rounds() == 12);
    CHECK(ens.train_loss() == std::get<TreeEnsemble>(models[1]).train_loss());
    const auto lin = std::get<LinearModel>(deserialize_model(serialize_model(models[0])).classifier);
    CHECK(lin.l2_lambda() == lc.l2_lambda);
    CHECK(lin.config().epochs == 20);
}

TEST_CASE("metadata survives a file round trip") {
    const auto data = noisy(60, 4, 2, 3);
    const Classifier model = train_linear(data.x, data.y, {"generated", "human"}, LinearConfig{});
    const auto meta = sample_metadata();
    const auto path = (std::filesystem::temp_directory_path() / "mgt_test_model.bin").string();
    save_model(path, model, meta);
    const auto back = load_model(path);
    std::filesystem::remove(path);
    REQUIRE(back.metadata.has_value());
    CHECK(back.metadata->task == Task::attribution);
    CHECK(back.metadata->features == FeatureSet::both);
    CHECK(back.metadata->preprocess == PreprocessMode::strict_ascii);
    CHECK(back.metadata->scaler.mean == meta.scaler.mean);
    CHECK(back.metadata->scaler.stddev == meta.scaler.stddev);
    CHECK(back.metadata->scaler.constant == meta.scaler.constant);
    CHECK(back.metadata->embeddings_path == meta.embeddings_path);
    CHECK(back.metadata->embeddings_digest == meta.embeddings_digest);
    CHECK_THROWS_AS(load_model(path), IoError);
}

TEST_CASE("damaged model files are rejected") {
    const auto data = noisy(60, 3, 2, 4);
    GbdtConfig gc;
    gc.rounds = 3;
    const auto bytes = serialize_model(train_gbdt(data.x, data.y, {"generated", "human"}, gc), sample_metadata());

    auto bad = bytes;
    bad[1] = 'X';
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("magic"), FormatError);

    bad = bytes;
    put_u32(bad, 4, 9);
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("version"), FormatError);

    bad = bytes;
    bad[bytes.size() / 2] ^= 0x40;
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("checksum"), FormatError);

    for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
        CHECK_THROWS_AS(deserialize_model(std::string_view(bytes).substr(0, cut)), FormatError);
    }

    bad = bytes;
    put_u32(bad, 8, 7);
    reseal(bad);
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("kind"), FormatError);

    // a linear body under the ensemble tag fails structurally, not silently
    const Classifier linear = train_linear(data.x, data.y, {"generated", "human"}, LinearConfig{});
    bad = serialize_model(linear);
    put_u32(bad, 8, 2);
    reseal(bad);
    CHECK_THROWS_AS(deserialize_model(bad), FormatError);
}

TEST_CASE("feature set names") {
    for (auto set : {FeatureSet::stylo, FeatureSet::embed, FeatureSet::both}) {
        CHECK(parse_feature_set(to_string(set)) == set);
    }
    CHECK_THROWS_AS(parse_feature_set("words"), ValidationError);
}
